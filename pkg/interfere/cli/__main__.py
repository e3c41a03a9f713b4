#!/usr/bin/env python3
from . import cli

if __name__ == '__main__':
    cli()
