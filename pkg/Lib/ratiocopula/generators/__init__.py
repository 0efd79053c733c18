import importlib
import logging
import re
from collections.abc import Mapping
from inspect import isclass

import numpy as np

from ratiocopula.constants import Side
from ratiocopula.errors import DomainError, InvalidGeneratorSpec
from ratiocopula.util import _loadPluginFromString

from .base import BaseGenerator, GeneratorSpec
from .cosine import CosineGenerator
from .customTable import CustomTableGenerator
from .expRatio import ExpRatioGenerator
from .expShift import ExpShiftGenerator
from .linear import LinearGenerator
from .logB import LogBGenerator
from .piecewiseHM import PiecewiseHMGenerator
from .power import PowerGenerator
from .reflectedPower import ReflectedPowerGenerator

__all__ = [
    "BaseGenerator",
    "GeneratorSpec",
    "CosineGenerator",
    "CustomTableGenerator",
    "ExpRatioGenerator",
    "ExpShiftGenerator",
    "LinearGenerator",
    "LogBGenerator",
    "PiecewiseHMGenerator",
    "PowerGenerator",
    "ReflectedPowerGenerator",
    "eval_d1",
    "eval_d2",
    "eval_value",
    "getGeneratorClass",
    "loadGeneratorFromString",
    "make_envelope",
    "make_generator",
    "normalize",
]


logger = logging.getLogger(__name__)


def _familyNames(family):
    # "exp_shift" -> ("expShift", "ExpShiftGenerator");
    # "piecewise_hM" -> ("piecewiseHM", "PiecewiseHMGenerator")
    parts = [p for p in re.split(r"[_\-\s]+", family.strip()) if p]
    if not parts:
        raise ValueError(family)
    head = parts[0][0].lower() + parts[0][1:]
    moduleName = head + "".join(p[0].upper() + p[1:] for p in parts[1:])
    className = moduleName[0].upper() + moduleName[1:]
    if not className.endswith("Generator"):
        className += "Generator"
    return moduleName, className


def getGeneratorClass(family, pkg="ratiocopula.generators"):
    """Given a family name, import and return the generator class.
    By default, generator modules are searched within the
    ``ratiocopula.generators`` package.
    """
    moduleName, className = _familyNames(family)
    module = importlib.import_module(".".join([pkg, moduleName]))
    return getattr(module, className)


def isValidGenerator(klass):
    """Return True if 'klass' is a generator class, i.e. a class deriving
    from BaseGenerator.
    """
    if not isclass(klass):
        logger.error(f"{klass!r} is not a class")
        return False
    if not issubclass(klass, BaseGenerator):
        logger.error(f"{klass!r} is not a BaseGenerator subclass")
        return False
    return True


def make_generator(spec):
    """Build a generator from a GeneratorSpec, its dict form, or a spec
    string (see loadGeneratorFromString).

    Raises InvalidGeneratorSpec for unknown families, unknown or missing
    parameters, and parameters outside the family's domain.
    """
    if isinstance(spec, BaseGenerator):
        return spec
    if isinstance(spec, str):
        return loadGeneratorFromString(spec)
    if isinstance(spec, Mapping):
        spec = GeneratorSpec.fromDict(spec)
    try:
        klass = getGeneratorClass(spec.family)
    except (ImportError, AttributeError, ValueError) as e:
        raise InvalidGeneratorSpec(f"unknown generator family: {spec.family!r}") from e
    try:
        return klass(**spec.params)
    except TypeError as e:
        raise InvalidGeneratorSpec(f"{spec.family}: {e}") from e


def loadGeneratorFromString(spec):
    """Take a string specifying a generator and return the generator object.

    The string is either a JSON object in the GeneratorSpec format, or
    follows the plugin notation:
    - an optional python module, followed by '::'; when given, the name
      that follows is a class in that module, otherwise a family name
    - a required family (or class) name
    - an optional list of keyword arguments enclosed by parentheses

    Examples:

    >>> loadGeneratorFromString("log_b(b=41)")
    LogBGenerator(b=41.0)
    >>> loadGeneratorFromString('{"family": "power", "params": {"n": 3}}')
    PowerGenerator(n=3.0)
    """
    text = spec.strip()
    if text.startswith("{"):
        return make_generator(GeneratorSpec.fromJSON(text))

    def resolve(name):
        try:
            return getGeneratorClass(name)
        except (ImportError, AttributeError) as e:
            raise InvalidGeneratorSpec(f"unknown generator family: {name!r}") from e

    try:
        return _loadPluginFromString(text, resolve, isValidGenerator)
    except (ValueError, NameError) as e:
        raise InvalidGeneratorSpec(f"malformed generator string: {spec!r}") from e
    except TypeError as e:
        raise InvalidGeneratorSpec(f"{spec}: {e}") from e


def normalize(gen):
    """Return (gen / gen(0), gen(0)).

    The caller multiplies theta by f(0) * g(0) to keep the copula unchanged.
    """
    v0 = float(gen.value(0.0))
    if v0 == 0:
        raise DomainError(f"cannot normalize {gen!r}: value(0) = 0")
    if v0 == 1.0:
        return gen, 1.0
    return gen.normalized(), v0


def _checkUnit(u):
    u = np.asarray(u, dtype=float)
    if np.any(~((u >= 0) & (u <= 1))):
        raise DomainError(f"evaluation point outside [0, 1]: {u!r}")
    return u


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def eval_value(gen, u, side=Side.DEFAULT):
    return _scalar(gen.value(_checkUnit(u)))


def eval_d1(gen, u, side=Side.DEFAULT):
    """First derivative; at a kink DEFAULT is the left limit, LEFT and RIGHT
    the respective one-sided limits.
    """
    return _scalar(gen.d1(_checkUnit(u), side))


def eval_d2(gen, u, side=Side.DEFAULT):
    return _scalar(gen.d2(_checkUnit(u)))


def make_envelope(gen):
    """The h_M dominating a concave decreasing generator with gen(0) = 1,
    gen(1) = 0: M = -gen'(1).
    """
    M = -float(gen.d1(1.0, Side.LEFT))
    if M < 1:
        raise DomainError(f"{gen!r} has -d1(1) = {M!r} < 1, no h_M envelope")
    return PiecewiseHMGenerator(M=M)
