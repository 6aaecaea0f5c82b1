"""Reader for ``.norm`` spec files.

A spec file is UTF-8 text with one ``key=value`` pair per line and ``#``
comments::

    # lens with beta 0.2 sheared
    kind=transform
    base=lens02.norm
    matrix=2,1,0,1
"""

import logging
from pathlib import Path

from .errors import ParseError
from .structs.linear_map import LinearMap2x2
from .structs.norm_spec import NormSpec, SpecKind
from .structs.vector import parse_vector_list

logger = logging.getLogger(__name__)

KIND_KEYS: dict[SpecKind, tuple[str, ...]] = {
    SpecKind.PNORM: ("p",),
    SpecKind.POLYGON: ("vertices",),
    SpecKind.LENS: ("beta",),
    SpecKind.DOUBLE_LENS: (),
    SpecKind.TRANSFORM: ("base", "matrix"),
}
KNOWN_KEYS = {"kind", "p", "vertices", "beta", "base", "matrix"}


def _read_pairs(text: str, path: str) -> dict[str, tuple[str, int]]:
    pairs: dict[str, tuple[str, int]] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected key=value, got {line!r}", path, number)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ParseError("unknown key", path, number, key)
        if key in pairs:
            raise ParseError("duplicate key", path, number, key)
        pairs[key] = (value, number)
    return pairs


def _real(value: str, path: str, line: int, key: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ParseError(f"not a real number: {value!r}", path, line, key) from None


def parse_spec(
    text: str,
    path: str = "<string>",
    base_dir: Path | None = None,
    _stack: tuple[Path, ...] = (),
) -> NormSpec:
    """Parse the text of a spec file.

    :param text: File contents
    :type text: str
    :param path: Name used in error messages
    :type path: str
    :param base_dir: Directory that ``base=`` paths are relative to,
        defaults to the working directory
    :type base_dir: Path | None
    :raises ParseError: On unknown, duplicate, missing or misplaced keys,
        unparsable values or an include cycle
    :return: The parsed spec (not yet validated as a norm)
    :rtype: NormSpec
    """
    pairs = _read_pairs(text, path)
    if "kind" not in pairs:
        raise ParseError("missing required key", path, 0, "kind")
    kind_text, kind_line = pairs.pop("kind")
    try:
        kind = SpecKind(kind_text)
    except ValueError:
        message = f"unknown kind {kind_text!r}"
        raise ParseError(message, path, kind_line, "kind") from None
    wanted = KIND_KEYS[kind]
    for key, (_, line) in pairs.items():
        if key not in wanted:
            raise ParseError(f"key not allowed for kind {kind.value}", path, line, key)
    for key in wanted:
        if key not in pairs:
            raise ParseError("missing required key", path, 0, key)

    match kind:
        case SpecKind.PNORM:
            value, line = pairs["p"]
            return NormSpec.pnorm(_real(value, path, line, "p"))
        case SpecKind.POLYGON:
            value, line = pairs["vertices"]
            try:
                return NormSpec.polygon(parse_vector_list(value))
            except ValueError as e:
                raise ParseError(str(e), path, line, "vertices") from None
        case SpecKind.LENS:
            value, line = pairs["beta"]
            return NormSpec.lens(_real(value, path, line, "beta"))
        case SpecKind.DOUBLE_LENS:
            return NormSpec.double_lens()
        case SpecKind.TRANSFORM:
            value, line = pairs["matrix"]
            try:
                matrix = LinearMap2x2.from_string(value)
            except ValueError as e:
                raise ParseError(str(e), path, line, "matrix") from None
            base_text, base_line = pairs["base"]
            base_path = (base_dir or Path.cwd()) / base_text
            resolved = base_path.resolve()
            if resolved in _stack:
                raise ParseError("include cycle", path, base_line, "base")
            if not base_path.is_file():
                raise ParseError(
                    f"base file not found: {base_path}", path, base_line, "base"
                )
            base = _load(base_path, _stack)
            return NormSpec.transform(base, matrix)
    raise ParseError(f"unhandled kind {kind.value}", path, kind_line, "kind")


def _load(path: Path, stack: tuple[Path, ...]) -> NormSpec:
    resolved = path.resolve()
    text = path.read_text(encoding="utf-8")
    return parse_spec(text, str(path), path.parent, stack + (resolved,))


def load_spec(path: str | Path) -> NormSpec:
    """Read and parse a ``.norm`` file.

    ``base=`` paths of transform specs resolve relative to the file that
    names them.

    :param path: Path to the spec file
    :type path: str | Path
    :raises ParseError: If the file is missing or malformed
    :return: The parsed spec
    :rtype: NormSpec
    """
    path = Path(path)
    if not path.is_file():
        raise ParseError("spec file not found", str(path))
    spec = _load(path, ())
    logger.debug("loaded %s from %s", spec.describe(), path)
    return spec
