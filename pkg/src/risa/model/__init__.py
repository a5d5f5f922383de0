from .attention import geo_struct_attention, part_geo_attention
from .config import ModelConfig, Mode
from .globalvae import GlobalOutput, global_vae_forward
from .inputs import ShapeBatch, ShapeInput, shape_input_from_parts
from .network import ForwardOutput, model_forward, standardize
from .params import init_params
from .partvae import PartOutput, partvae_forward
