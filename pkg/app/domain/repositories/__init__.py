# This file makes 'repositories' a Python package.