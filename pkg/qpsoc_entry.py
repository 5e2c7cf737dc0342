"""
Launcher for the qpsoc command line, also the PyInstaller target for a
standalone binary.
"""
import io
import os
import sys

# Reports are UTF-8 (node labels, +/- loop markers); Windows consoles default to cp1252
if sys.platform == 'win32':
    sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding='utf-8', errors='replace')
    sys.stderr = io.TextIOWrapper(sys.stderr.buffer, encoding='utf-8', errors='replace')

# Bundled builds unpack next to sys._MEIPASS
root = sys._MEIPASS if getattr(sys, 'frozen', False) else os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, root)

if __name__ == "__main__":
    from qpsoc.main import main

    sys.exit(main())
