"""
Serialisation helpers for the reports printed by the command line.
"""

import dataclasses
import json
import math
from enum import Enum
from typing import Optional

import numpy as np


def to_json(*args, **kwargs):
    kwargs.setdefault("indent", 2)

    kwargs["sort_keys"] = True
    kwargs["ensure_ascii"] = False
    kwargs["separators"] = (",", ": ")

    return json.dumps(*args, **kwargs)


class ReportMixin(object):
    """A base set of helper methods for dataclass based reports"""

    def get_value(self, field):
        """Returns the field's value and formats the types value"""
        return _format_type(getattr(self, field))

    def to_dict(self):
        """Returns a ``dict`` with key-values derived from the dataclass fields"""
        return {f.name: self.get_value(f.name) for f in dataclasses.fields(self)}

    def to_json(self):
        """Returns a ``str`` of sorted JSON derived from the fields"""
        return to_json(self.to_dict())

    def to_text(self):
        """Returns one ``key: value`` line per field, floats at full precision"""
        lines = []
        for key, value in self.to_dict().items():
            if isinstance(value, float):
                value = f'{value:.17g}'
            elif isinstance(value, (dict, list)):
                value = json.dumps(value, sort_keys=True)
            elif value is None:
                value = '-'
            lines.append(f'{key}: {value}')
        return '\n'.join(lines)


def _format_type(value):
    """A type helper to format values"""
    if isinstance(value, Enum):
        return value.value

    if isinstance(value, (float, np.floating)):
        return _format_float(float(value))

    if isinstance(value, np.ndarray):
        return [_format_type(item) for item in value.tolist()]

    if isinstance(value, (list, tuple)):
        return [_format_type(item) for item in value]

    if isinstance(value, dict):
        return {_format_key(k): _format_type(v) for k, v in value.items()}

    if hasattr(value, "to_dict"):
        return value.to_dict()

    return value


def _format_key(key):
    if isinstance(key, tuple):
        return str(list(key))
    return str(key)


def _format_float(value: float) -> Optional[float]:
    # JSON has no infinities; -inf only arises as the log-variable of an
    # unbounded program
    if math.isinf(value) or math.isnan(value):
        return None
    return value
