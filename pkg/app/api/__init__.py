# This file makes 'api' a Python package.