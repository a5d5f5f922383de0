from ._compat import metadata

try:
    __version__ = metadata.version(__package__)
except metadata.PackageNotFoundError:
    # Local run without installation
    __version__ = "dev"

# Leaky-ReLU negative slope
LEAKY_SLOPE = 0.02
BATCH_NORM_EPS = 1e-5
BATCH_NORM_MOMENTUM = 0.1
# Length of the structural feature vector of a single part
STRUCT_DIM = 11
# Environment variable that caps worker threads
THREADS_ENV_VAR = "RISA_THREADS"
DEFAULT_TEMPLATE_LEVEL = 1
CHECKPOINT_MAGIC = b"RISA1"
MANIFEST_FILE_NAME = "manifest.json"
LABELS_FILE_NAME = "labels.json"
