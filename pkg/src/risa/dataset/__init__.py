from .audit import audit_separability, class_separation
from .external import load_external, write_labels
from .families import BUILTIN_FAMILIES, TABLES3, FamilySpec, PartSpec, SubclassSpec, load_family_spec
from .features import FeatureSet, extract_features, load_parts
from .generate import generate
from .manifest import MISSING, DatasetManifest, ShapeRecord, load_manifest
from .perturb import perturb_rotations
from .splits import split
