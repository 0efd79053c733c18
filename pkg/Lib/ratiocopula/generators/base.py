from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from types import MappingProxyType, SimpleNamespace
from typing import Any, Mapping

import numpy as np

from ratiocopula.constants import Side
from ratiocopula.errors import DomainError, InvalidGeneratorSpec

# reuse the "ratiocopula.generators" logger
logger = logging.getLogger("ratiocopula.generators")

# query points closer than this to a kink are treated as sitting on it
KINK_ATOL = 1e-12

SPEC_KEYS = frozenset(["family", "params"])


def _plainParam(value):
    if isinstance(value, (list, tuple, np.ndarray)):
        return [float(x) for x in value]
    return float(value)


@dataclass(frozen=True)
class GeneratorSpec:
    """Family name plus parameters, as read from or written to JSON:

        {"family": "power", "params": {"n": 3.0}}
    """

    family: str
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.family, str) or not self.family:
            raise InvalidGeneratorSpec(f"invalid family name: {self.family!r}")
        if not isinstance(self.params, Mapping):
            raise InvalidGeneratorSpec(
                f"{self.family}: 'params' must be an object, got {self.params!r}"
            )
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))

    @classmethod
    def fromDict(cls, data):
        if not isinstance(data, Mapping):
            raise InvalidGeneratorSpec(f"generator spec must be an object: {data!r}")
        unknown = sorted(set(data).difference(SPEC_KEYS))
        if unknown:
            raise InvalidGeneratorSpec(
                "unknown key{} in generator spec: {}".format(
                    "s" if len(unknown) > 1 else "", ", ".join(repr(k) for k in unknown)
                )
            )
        if "family" not in data:
            raise InvalidGeneratorSpec("generator spec is missing the 'family' key")
        return cls(data["family"], data.get("params", {}))

    @classmethod
    def fromJSON(cls, s):
        try:
            data = json.loads(s)
        except json.JSONDecodeError as e:
            raise InvalidGeneratorSpec(f"malformed generator JSON: {e}") from e
        return cls.fromDict(data)

    def toDict(self):
        return {
            "family": self.family,
            "params": {k: _plainParam(v) for k, v in self.params.items()},
        }

    def toJSON(self, **kwargs):
        return json.dumps(self.toDict(), **kwargs)

    def __str__(self):
        if not self.params:
            return self.family
        args = ", ".join(f"{k}={_plainParam(v)!r}" for k, v in self.params.items())
        return f"{self.family}({args})"


class BaseGenerator:
    """A univariate function on [0, 1] with analytic first derivative and,
    when ``hasD2`` is true, analytic second derivative.

    Subclasses implement the unscaled shape ``_value``, ``_d1`` and
    (optionally) ``_d2``; every family also accepts a ``scale`` keyword
    that multiplies the value and its derivatives. ``_complement`` should be
    overridden with a cancellation-free form of 1 - f(u)/f(0) where one
    exists.

    Instances are immutable; all evaluations are vectorized over numpy
    arrays and safe to call from any thread.
    """

    # registry name, e.g. "log_b"
    family = None

    # tuple of strings listing the names of required positional arguments
    # which will be set as attributes of the generator options
    _args = ()

    # dictionary containing the names of optional keyword arguments and
    # their default values
    _kwargs = {}

    hasD2 = True

    def __init__(self, *args, **kwargs):
        self.options = options = SimpleNamespace()

        num_required = len(self._args)
        num_args = len(args)
        # process positional arguments as keyword arguments
        if num_args < num_required:
            args = (
                *args,
                *(kwargs.pop(a) for a in self._args[num_args:] if a in kwargs),
            )
            num_args = len(args)
            duplicated_args = [k for k in self._args if k in kwargs]
            if duplicated_args:
                num_duplicated = len(duplicated_args)
                raise TypeError(
                    "got {} duplicated positional argument{}: {}".format(
                        num_duplicated,
                        "s" if num_duplicated > 1 else "",
                        ", ".join(duplicated_args),
                    )
                )
        if num_args < num_required:
            missing = [repr(a) for a in self._args[num_args:]]
            num_missing = len(missing)
            raise TypeError(
                "missing {} required positional argument{}: {}".format(
                    num_missing, "s" if num_missing > 1 else "", ", ".join(missing)
                )
            )
        elif num_args > num_required:
            extra = [repr(a) for a in args[num_required:]]
            num_extra = len(extra)
            raise TypeError(
                "got {} unsupported positional argument{}: {}".format(
                    num_extra, "s" if num_extra > 1 else "", ", ".join(extra)
                )
            )
        for key, value in zip(self._args, args):
            setattr(options, key, self._coerce(key, value))

        for key, default in self._kwargs.items():
            setattr(options, key, self._coerce(key, kwargs.pop(key, default)))

        self.scale = float(kwargs.pop("scale", 1.0))

        if kwargs:
            num_left = len(kwargs)
            raise TypeError(
                "got {}unsupported keyword argument{}: {}".format(
                    "an " if num_left == 1 else "",
                    "s" if len(kwargs) > 1 else "",
                    ", ".join(f"'{k}'" for k in kwargs),
                )
            )

        if not math.isfinite(self.scale) or self.scale == 0:
            raise InvalidGeneratorSpec(
                f"{self.family}: scale must be finite and non-zero, got {self.scale!r}"
            )

        # validate the family's parameter domain
        self.start()

    def _coerce(self, key, value):
        try:
            return float(value)
        except (TypeError, ValueError) as e:
            raise InvalidGeneratorSpec(
                f"{self.family}: parameter {key!r} must be a real number, "
                f"got {value!r}"
            ) from e

    def start(self):
        """Subclasses can perform domain checks here."""
        pass

    def _require(self, name, ok, bound):
        if not ok:
            raise InvalidGeneratorSpec(
                f"{self.family}: parameter {name}={getattr(self.options, name)!r} "
                f"out of domain, requires {bound}"
            )

    @property
    def params(self):
        params = {k: getattr(self.options, k) for k in (*self._args, *self._kwargs)}
        if self.scale != 1.0:
            params["scale"] = self.scale
        return params

    @property
    def spec(self):
        return GeneratorSpec(self.family, self.params)

    @property
    def kinks(self):
        """Ordered interior points where d1 is discontinuous."""
        return ()

    def __repr__(self):
        items = [f"{k}={v!r}" for k, v in self.params.items()]
        return "{}({})".format(type(self).__name__, ", ".join(items))

    def __eq__(self, other):
        if not isinstance(other, BaseGenerator):
            return NotImplemented
        return type(self) is type(other) and self.spec.toDict() == other.spec.toDict()

    def __hash__(self):
        return hash(repr(self))

    # -- shape functions, unscaled ------------------------------------------

    def _value(self, u):
        raise NotImplementedError

    def _d1(self, u, side):
        raise NotImplementedError

    def _d2(self, u):
        raise NotImplementedError

    def _complement(self, u):
        return 1.0 - self._value(u) / self._value(np.float64(0.0))

    # -- public evaluation ---------------------------------------------------

    def value(self, u):
        return self.scale * self._value(np.asarray(u, dtype=float))

    def d1(self, u, side=Side.DEFAULT):
        return self.scale * self._d1(np.asarray(u, dtype=float), Side(side))

    def d2(self, u):
        if not self.hasD2:
            raise DomainError(f"{self.family} has no second derivative")
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.scale * self._d2(np.asarray(u, dtype=float))

    def complement(self, u):
        """1 - f(u)/f(0), free of the cancellation of the direct formula."""
        return self._complement(np.asarray(u, dtype=float))

    def scaled(self, factor):
        """The same family with its scale multiplied by 'factor'."""
        params = self.params
        params["scale"] = self.scale * factor
        return type(self)(**params)

    def normalized(self):
        """The same shape rescaled so that value(0) == 1."""
        v0 = float(self.value(0.0))
        if v0 == 0:
            raise DomainError(f"cannot normalize {self!r}: value(0) = 0")
        return self.scaled(1.0 / v0)
