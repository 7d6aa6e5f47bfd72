import csv
import hashlib
import json
import os
import sys

from .constants import VERSION

# --------- Mensajes de consola ----------
_VERBOSE = True


def set_verbose(flag):
    global _VERBOSE
    _VERBOSE = bool(flag)


def info(msg):
    if _VERBOSE:
        print(f"[INFO] {msg}", file=sys.stderr)


def aviso(msg):
    print(f"[AVISO] {msg}", file=sys.stderr)


def error(msg):
    print(f"[ERROR] {msg}", file=sys.stderr)


# --------- Hash de configuración ----------
def config_hash(config):
    """Huella corta y estable de un dict de configuración."""
    payload = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]


# --------- CSV ----------
def fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    try:
        return f"{float(value):.12g}"
    except (TypeError, ValueError):
        return str(value)


def write_csv(ruta, header, rows, config=None, basis_size=None):
    """Escribe un CSV con una línea de comentario y la cabecera.

    La salida es determinista: mismo config y mismas filas, mismos bytes.
    """
    carpeta = os.path.dirname(os.path.abspath(ruta))
    if carpeta and not os.path.isdir(carpeta):
        os.makedirs(carpeta, exist_ok=True)
    huella = config_hash(config or {})
    with open(ruta, "w", encoding="utf-8", newline="") as f:
        f.write(f"# config={huella} basis={basis_size if basis_size is not None else '-'} "
                f"version={VERSION}\n")
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    info(f"CSV escrito en '{ruta}' ({len(rows)} filas)")
    return ruta


def read_csv(ruta):
    """Lee un CSV propio: devuelve (comentario, cabecera, filas)."""
    with open(ruta, "r", encoding="utf-8") as f:
        comentario = f.readline().rstrip("\n")
        r = csv.reader(f)
        filas = list(r)
    return comentario, filas[0], filas[1:]
