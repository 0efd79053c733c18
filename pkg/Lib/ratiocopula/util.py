import csv
import importlib
import io
import logging
import math
import re
import sys
from contextlib import contextmanager

from ratiocopula.constants import CSV_DIGITS

logger = logging.getLogger(__name__)


def _kwargsEval(s):
    return eval(
        "dict(%s)" % s,
        {
            "__builtins__": {
                "True": True,
                "False": False,
                "dict": dict,
                "inf": math.inf,
                "pi": math.pi,
                "e": math.e,
            }
        },
    )


_pluginSpecRE = re.compile(
    r"(?:([\w\.]+)::)?"  # MODULE_NAME + '::'
    r"([\w\-]+)"  # CLASS_OR_FAMILY_NAME [required]
    r"(?:\((.*)\))?"  # (KWARGS)
)


def _parsePluginString(spec):
    """Split 'module::Name(k=v, ...)' into (module or None, name, kwargs).

    Raises ValueError if the string doesn't conform to that notation or the
    keyword arguments cannot be evaluated.
    """
    spec = spec.strip()
    m = _pluginSpecRE.match(spec)
    if not m or (m.end() - m.start()) != len(spec):
        raise ValueError(spec)
    kwargs = m.group(3)
    try:
        options = _kwargsEval(kwargs) if kwargs else {}
    except SyntaxError as e:
        raise ValueError("options have incorrect format: %r" % kwargs) from e
    return m.group(1), m.group(2), options


def _loadPluginFromString(spec, resolveName, isValidFunc):
    """Instantiate the class named by a plugin string.

    'resolveName' maps a bare name (no 'module::' prefix) to a class; names
    with an explicit module are imported from it.
    """
    moduleName, name, options = _parsePluginString(spec)
    if moduleName:
        module = importlib.import_module(moduleName)
        klass = getattr(module, name)
    else:
        klass = resolveName(name)
    if not isValidFunc(klass):
        raise TypeError(klass)
    return klass(**options)


def formatNumber(value, digits=CSV_DIGITS):
    """Format a float with the given number of significant digits."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{digits}g}"


@contextmanager
def _openOutput(path):
    if path is None or path == "-":
        yield sys.stdout
    elif isinstance(path, io.IOBase) or hasattr(path, "write"):
        yield path
    else:
        with open(path, "w", newline="", encoding="utf-8") as f:
            yield f


def writeCSV(path, header, rows, digits=CSV_DIGITS):
    """Write 'rows' under a mandatory 'header' row.

    Numbers are written with 'digits' significant digits and '.' as decimal
    separator; lines end with '\\n'. 'path' may be a file name, an open text
    stream, or None / '-' for stdout. Returns the number of data rows.
    """
    if not header:
        raise ValueError("CSV output requires a header row")
    count = 0
    with _openOutput(path) as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [
                    formatNumber(x, digits) if isinstance(x, (int, float)) else x
                    for x in _plain(row)
                ]
            )
            count += 1
    return count


def readCSV(path):
    """Read a CSV written by writeCSV into (header, rows of floats)."""
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = [[float(x) for x in row] for row in reader if row]
    return header, rows


def _plain(row):
    # numpy scalars are not instances of float/int for every dtype
    return [x.item() if hasattr(x, "item") else x for x in row]


def bisect(predicate, good, bad, width, maxiter=200):
    """Shrink the bracket [good, bad] (in either order) while keeping
    predicate(good) true and predicate(bad) false, until |bad - good| <= width.

    Returns the final (good, bad) pair. The predicate is assumed to have
    been checked at both initial ends by the caller.
    """
    for _ in range(maxiter):
        if abs(bad - good) <= width:
            break
        mid = 0.5 * (good + bad)
        if predicate(mid):
            good = mid
        else:
            bad = mid
    return good, bad
