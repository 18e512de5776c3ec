"""Run gfcodebook as ``python -m gfcodebook``."""

from gfcodebook.main import main

main()
