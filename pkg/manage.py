#!/usr/bin/env python
"""Entry point for the GEC management commands (gen_data, train, ablate, correct, tree_targets, eval)."""
import os
import sys


def main():
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "GEC_System.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django, which runs the GEC commands. Install requirements/local.txt "
            "into the active virtual environment."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
