import json
import pathlib
from typing import Any, Dict, Union

import jsonschema
import yaml

from .exceptions import ConfigParse
from .utils import SafeLoader


def load_document(path: Union[str, pathlib.Path]) -> Any:
    """Read a YAML or JSON document. JSON is parsed as YAML, which is a superset of it."""
    try:
        with open(path, encoding="utf-8") as fd:
            return yaml.load(fd, Loader=SafeLoader)
    except yaml.YAMLError as exc:
        raise ConfigParse(f"{path}: not a valid YAML / JSON document ({exc.__class__.__name__})") from exc


def validate_document(instance: Any, schema: Dict[str, Any], location: str) -> None:
    try:
        jsonschema.validate(instance, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(item) for item in exc.absolute_path) or "<root>"
        raise ConfigParse(f"{location}: invalid value at `{where}`: {exc.message}") from exc


def write_json(path: Union[str, pathlib.Path], document: Any) -> None:
    pathlib.Path(path).write_text(json.dumps(document, indent=2, sort_keys=False) + "\n", encoding="utf-8")
