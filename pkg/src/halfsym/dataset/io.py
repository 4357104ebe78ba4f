"""Point-cloud file formats: XYZ text, ASCII PLY and NPY (v1.0).

XYZ  one ``x y z`` triple per line, ``#`` starts a comment.
PLY  ASCII 1.0; the ``vertex`` element must carry x, y and z properties;
     other elements and properties are ignored.
NPY  version 1.0 header, C order, dtype ``<f4`` or ``<f8``, shape (N, 3).
"""

import io
from pathlib import Path

import numpy as np
from numpy.lib import format as npy_format

from ..exceptions import CloudIOError, InvalidInputError, ParseError
from ..validation import check_cloud

FORMATS = ("xyz", "ply", "npy")
_NPY_DTYPES = ("<f4", "<f8")
_PLY_SCALARS = {
    "char", "uchar", "short", "ushort", "int", "uint", "float", "double",
    "int8", "uint8", "int16", "uint16", "int32", "uint32", "float32", "float64",
}


def infer_format(path, fmt=None):
    if fmt is not None:
        fmt = fmt.lower()
    else:
        fmt = Path(path).suffix.lower().lstrip(".")
    if fmt not in FORMATS:
        raise InvalidInputError(f"unsupported point-cloud format {fmt!r} for {path}")
    return fmt


def _validated(points, path):
    try:
        return check_cloud(points, name=str(path))
    except InvalidInputError as exc:
        raise InvalidInputError(f"validation failed: {exc}") from None


def _read_bytes(path):
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CloudIOError(f"cannot read {path}: {exc.strerror or exc}") from None


def parse_xyz(data, path=None):
    rows = []
    offset = 0
    for line in data.splitlines(keepends=True):
        text = line.decode("utf-8", errors="replace").split("#", 1)[0].strip()
        if text:
            parts = text.split()
            if len(parts) != 3:
                raise ParseError(f"expected 3 values per line, got {len(parts)}", offset, path)
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise ParseError("non-numeric coordinate", offset, path) from None
        offset += len(line)
    return np.array(rows, dtype=np.float64).reshape(-1, 3)


def _parse_ply_header(data, path):
    if not data.startswith(b"ply"):
        raise ParseError("missing 'ply' magic", 0, path)
    end = data.find(b"end_header")
    if end < 0:
        raise ParseError("missing end_header", 0, path)
    nl = data.find(b"\n", end)
    body_start = len(data) if nl < 0 else nl + 1
    elements = []
    offset = 0
    for raw in data[:body_start].splitlines(keepends=True):
        words = raw.decode("ascii", errors="replace").split()
        if not words or words[0] in ("ply", "comment", "obj_info", "end_header"):
            pass
        elif words[0] == "format":
            if len(words) != 3 or words[1] != "ascii":
                raise ParseError(f"only ASCII PLY is supported, got {' '.join(words[1:])}", offset, path)
        elif words[0] == "element":
            if len(words) != 3 or not words[2].isdigit():
                raise ParseError("malformed element line", offset, path)
            elements.append((words[1], int(words[2]), []))
        elif words[0] == "property":
            if not elements:
                raise ParseError("property before any element", offset, path)
            if words[1:2] == ["list"]:
                if len(words) != 5:
                    raise ParseError("malformed list property", offset, path)
                elements[-1][2].append((words[4], "list"))
            elif len(words) == 3 and words[1] in _PLY_SCALARS:
                elements[-1][2].append((words[2], words[1]))
            else:
                raise ParseError("malformed property line", offset, path)
        else:
            raise ParseError(f"unknown header keyword {words[0]!r}", offset, path)
        offset += len(raw)
    return elements, body_start


def parse_ply(data, path=None):
    elements, offset = _parse_ply_header(data, path)
    lines = data[offset:].splitlines(keepends=True)
    pos = 0
    points = None
    for name, count, props in elements:
        names = [p[0] for p in props]
        is_vertex = name == "vertex"
        if is_vertex:
            if not {"x", "y", "z"} <= set(names):
                raise ParseError("vertex element lacks x/y/z properties", 0, path)
            if any(kind == "list" for _, kind in props):
                raise ParseError("list properties on vertex are not supported", 0, path)
            cols = [names.index(a) for a in ("x", "y", "z")]
            points = np.empty((count, 3))
        for k in range(count):
            if pos >= len(lines):
                raise ParseError(f"file ends inside element {name!r}", offset, path)
            line = lines[pos]
            if is_vertex:
                parts = line.split()
                if len(parts) != len(props):
                    raise ParseError(
                        f"expected {len(props)} vertex values, got {len(parts)}", offset, path
                    )
                try:
                    points[k] = [float(parts[c]) for c in cols]
                except ValueError:
                    raise ParseError("non-numeric vertex value", offset, path) from None
            offset += len(line)
            pos += 1
    if points is None:
        raise ParseError("no vertex element", 0, path)
    return points


def _npy_header(fh, path):
    try:
        version = npy_format.read_magic(fh)
    except ValueError as exc:
        raise ParseError(f"bad NPY magic: {exc}", 0, path) from None
    if version != (1, 0):
        raise ParseError(f"only NPY version 1.0 is supported, got {version}", 6, path)
    try:
        shape, fortran, dtype = npy_format.read_array_header_1_0(fh)
    except ValueError as exc:
        raise ParseError(f"malformed NPY header: {exc}", 8, path) from None
    if dtype.str not in _NPY_DTYPES:
        raise ParseError(f"NPY dtype must be one of {_NPY_DTYPES}, got {dtype.str!r}", 8, path)
    if fortran:
        raise ParseError("Fortran-ordered NPY arrays are not supported", 8, path)
    if len(shape) != 2 or shape[1] != 3:
        raise ParseError(f"NPY array must have shape (N, 3), got {shape}", 8, path)
    return shape, dtype


def parse_npy(data, path=None):
    fh = io.BytesIO(data)
    shape, dtype = _npy_header(fh, path)
    start = fh.tell()
    need = shape[0] * 3 * dtype.itemsize
    if len(data) - start < need:
        raise ParseError(
            f"NPY data truncated: need {need} bytes, have {len(data) - start}", start, path
        )
    arr = np.frombuffer(data, dtype=dtype, count=shape[0] * 3, offset=start)
    return arr.reshape(shape).astype(np.float64)


def count_points(path, fmt=None):
    """Point count of a file (reads only the header for NPY)."""
    fmt = infer_format(path, fmt)
    if fmt == "npy":
        try:
            with open(path, "rb") as fh:
                return _npy_header(fh, path)[0][0]
        except OSError as exc:
            raise CloudIOError(f"cannot read {path}: {exc.strerror or exc}") from None
    return load_cloud(path, fmt).shape[0]


def load_cloud(path, fmt=None):
    """Read a point cloud as a float64 (N, 3) array."""
    fmt = infer_format(path, fmt)
    data = _read_bytes(path)
    parser = {"xyz": parse_xyz, "ply": parse_ply, "npy": parse_npy}[fmt]
    return _validated(parser(data, path), path)


def save_cloud(cloud, path, fmt=None, dtype="float64", precision=9):
    """Write ``cloud``; NPY keeps ``dtype``, text formats use ``precision`` digits."""
    fmt = infer_format(path, fmt)
    pts = check_cloud(cloud)
    if fmt == "npy":
        out_dtype = np.dtype(dtype).newbyteorder("<")
        if out_dtype.str not in _NPY_DTYPES:
            raise InvalidInputError(f"NPY dtype must be float32 or float64, got {dtype!r}")
        buf = io.BytesIO()
        npy_format.write_array(buf, np.ascontiguousarray(pts.astype(out_dtype)), version=(1, 0))
        payload = buf.getvalue()
    else:
        spec = f"%.{precision}g"
        body = "".join(f"{spec % x} {spec % y} {spec % z}\n" for x, y, z in pts)
        if fmt == "ply":
            kind = "float" if np.dtype(dtype) == np.float32 else "double"
            header = (
                "ply\nformat ascii 1.0\n"
                f"element vertex {pts.shape[0]}\n"
                f"property {kind} x\nproperty {kind} y\nproperty {kind} z\n"
                "end_header\n"
            )
            body = header + body
        payload = body.encode("ascii")
    try:
        Path(path).write_bytes(payload)
    except OSError as exc:
        raise CloudIOError(f"cannot write {path}: {exc.strerror or exc}") from None
