import os
import sys

# make `import pairnet` work without installing the package
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
