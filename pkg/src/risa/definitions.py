# JSON Schemas of the documents risa reads: run configs, family specs, dataset manifests and label files
from typing import Any, Dict

NUMBER = {"type": "number"}
POSITIVE_INTEGER = {"type": "integer", "minimum": 1}
VECTOR3 = {"type": "array", "items": NUMBER, "minItems": 3, "maxItems": 3}
RANGE = {"type": "array", "items": NUMBER, "minItems": 2, "maxItems": 2}
WIDTHS = {"type": "array", "items": POSITIVE_INTEGER, "minItems": 1}

PART: Dict[str, Any] = {
    "type": "object",
    "required": ["name", "center", "size"],
    "properties": {
        "name": {"type": "string"},
        "center": VECTOR3,
        "size": VECTOR3,
        # Only parts flagged here receive the radial profile of their sub-class
        "profiled": {"type": "boolean"},
    },
    "additionalProperties": False,
}

SUBCLASS: Dict[str, Any] = {
    "type": "object",
    "required": ["label"],
    "properties": {
        "label": {"type": "string"},
        "taper": RANGE,
        "turn": RANGE,
        "presence": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}},
    },
    "additionalProperties": False,
}

FAMILY_SPEC: Dict[str, Any] = {
    "type": "object",
    "required": ["name", "parts", "subclasses"],
    "properties": {
        "name": {"type": "string"},
        "level": {"type": "integer", "minimum": 0},
        "parts": {"type": "array", "items": PART, "minItems": 1},
        "subclasses": {"type": "array", "items": SUBCLASS, "minItems": 2},
        "jitter": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "noise": {"type": "number", "minimum": 0},
    },
    "additionalProperties": False,
}

SHAPE_RECORD: Dict[str, Any] = {
    "type": "object",
    "required": ["id", "label", "parts", "rotation", "split"],
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "label": {"type": "string"},
        "parts": {"type": "array", "items": {"type": "string"}},
        "rotation": {"type": "array", "items": NUMBER, "minItems": 4, "maxItems": 4},
        "split": {"enum": ["train", "test"]},
    },
    "additionalProperties": False,
}

MANIFEST: Dict[str, Any] = {
    "type": "object",
    "required": ["class_name", "parts", "level", "shapes"],
    "properties": {
        "class_name": {"type": "string"},
        "parts": POSITIVE_INTEGER,
        "level": {"type": "integer", "minimum": 0},
        "shapes": {"type": "array", "items": SHAPE_RECORD},
    },
    "additionalProperties": False,
}

LABELS: Dict[str, Any] = {
    "type": "object",
    "required": ["shapes"],
    "properties": {
        "class_name": {"type": "string"},
        "parts": POSITIVE_INTEGER,
        "shapes": {
            "type": "object",
            "additionalProperties": {
                "anyOf": [
                    {"type": "string"},
                    {
                        "type": "object",
                        "required": ["label"],
                        "properties": {
                            "label": {"type": "string"},
                            "split": {"enum": ["train", "test"]},
                            "rotation": {"type": "array", "items": NUMBER, "minItems": 4, "maxItems": 4},
                        },
                        "additionalProperties": False,
                    },
                ]
            },
        },
    },
    "additionalProperties": False,
}

RUN_CONFIG: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "paths": {
            "type": "object",
            "properties": {
                "dataset": {"type": "string"},
                "checkpoint": {"type": "string"},
                "output": {"type": "string"},
            },
            "additionalProperties": False,
        },
        "model": {
            "type": "object",
            "properties": {
                "latent_dim": POSITIVE_INTEGER,
                "descriptor_dim": POSITIVE_INTEGER,
                "attention_dim": POSITIVE_INTEGER,
                "encoder_widths": WIDTHS,
                "global_widths": WIDTHS,
                "geo_hidden": POSITIVE_INTEGER,
                "struct_hidden": POSITIVE_INTEGER,
                "variational": {"type": "boolean"},
                "use_structure": {"type": "boolean"},
                "base_feature": {"enum": ["scale-sensitive", "scale-invariant"]},
                "share_part_weights": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
        "train": {
            "type": "object",
            "properties": {
                "lr": {"type": "number", "exclusiveMinimum": 0},
                "batch_size": {"type": "integer", "minimum": 2},
                "gamma": {"type": "number", "minimum": 0},
                "lambda1": {"type": "number", "minimum": 0},
                "lambda2": {"type": "number", "minimum": 0},
                "lambda3": {"type": "number", "minimum": 0},
                "eta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "epochs": POSITIVE_INTEGER,
                "checkpoint_every": POSITIVE_INTEGER,
                "patience": {"type": "integer", "minimum": 0},
                "tolerance": {"type": "number", "minimum": 0},
                "triplet_reduction": {"enum": ["sum", "mean"]},
                "normalize_features": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
        "evaluation": {
            "type": "object",
            "properties": {
                "pool": {"enum": ["test", "all"]},
                "top_k": POSITIVE_INTEGER,
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}
