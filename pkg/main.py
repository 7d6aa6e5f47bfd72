import sys

from cohstates.app import CohApp
from cohstates.constants import EXIT_INTERRUPT

if __name__ == "__main__":
    app = CohApp()
    try:
        code = app.run(sys.argv[1:])
    except KeyboardInterrupt:
        print("[AVISO] Interrumpido por el usuario", file=sys.stderr)
        code = EXIT_INTERRUPT
    sys.exit(code)
