"""Plain-text `key = value` experiment configs"""
import logging
from pathlib import Path
from typing import Dict, Union

from pydantic import ValidationError

from ffdensity.exceptions import UsageError
from ffdensity.models.experiment import DensityExperiment, PredicateSpec

logger = logging.getLogger(__name__)

PREDICATE_KEYS = ("n", "t_scan", "k", "m", "f", "g", "t", "t_max", "d")
EXPERIMENT_KEYS = ("spec", "arity", "chain", "j_min", "j_max", "mode", "cap", "seed", "samples", "reference")

# chain entries are separated by this token since divisors contain `+`
CHAIN_SEPARATOR = "|"


def parse_key_values(text: str) -> Dict[str, str]:
    """`key = value` per line; `#` starts a comment line; the first `=` splits"""
    entries: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"Line {number}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        key = key.strip().lower()
        if key in entries:
            raise UsageError(f"Line {number}: duplicate key {key!r}")
        entries[key] = value.strip()
    return entries


def parse_experiment(text: str) -> DensityExperiment:
    entries = parse_key_values(text)
    if "predicate" not in entries:
        raise UsageError("Experiment config must name a predicate")
    unknown = set(entries) - set(PREDICATE_KEYS) - set(EXPERIMENT_KEYS) - {"predicate"}
    if unknown:
        raise UsageError(f"Unknown experiment keys: {', '.join(sorted(unknown))}")
    predicate_fields = {key: entries[key] for key in PREDICATE_KEYS if key in entries}
    experiment_fields = {key: entries[key] for key in EXPERIMENT_KEYS if key in entries}
    if "chain" in experiment_fields:
        experiment_fields["chain"] = [item.strip() for item in experiment_fields["chain"].split(CHAIN_SEPARATOR)
                                      if item.strip()]
    try:
        predicate = PredicateSpec(name=entries["predicate"], **predicate_fields)
        return DensityExperiment(predicate=predicate, **experiment_fields)
    except ValidationError as e:
        raise UsageError(f"Invalid experiment config: {e}") from e


def load_experiment(path: Union[str, Path]) -> DensityExperiment:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"Cannot read experiment config {path}: {e}") from e
    logger.debug(f"Loaded experiment config from {path}")
    return parse_experiment(text)
