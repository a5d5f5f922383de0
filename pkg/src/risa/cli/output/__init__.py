from . import default
