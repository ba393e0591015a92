import sys
import os

project_root = os.path.dirname(os.path.abspath(__file__))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

try:
    from chebresize.core.app import ChebResizeApp
except ImportError as e:
    print(f"Error importing ChebResizeApp: {e}", file=sys.stderr)
    print(f"Project Root: {project_root}", file=sys.stderr)
    sys.exit(1)

if __name__ == "__main__":
    app = ChebResizeApp()
    sys.exit(app.run(sys.argv[1:]))
