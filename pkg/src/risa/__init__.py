from . import hooks
from .constants import __version__
from .dataset import extract_features, load_manifest
from .embedding import TrainedModel, embed
from .retrieval import DescriptorIndex, evaluate, query
from .runner import prepare, train
