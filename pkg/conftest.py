import os
import sys

# Modules import each other flat from the repository root, as Certify.py does
sys.path.insert(0, os.path.dirname(os.path.realpath(__file__)))
