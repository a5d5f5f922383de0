from .checkpoint import load_checkpoint, save_checkpoint
from .core import Gradients, Tape, Tensor, backward
from .layers import EdgeConvWeights, batch_norm, edge_conv, fc, kl_gaussian, leaky_relu, softmax
from .optim import adam_step
from .params import BoundParameters, ParameterSet
