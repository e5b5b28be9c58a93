"""
Base class for the GEC management commands.

Adds default-value rendering to --help, disables Django system checks (no
database is configured) and maps SGGECError subclasses onto exit codes:
0 success, 2 usage, 3 data/validation, 4 numeric divergence.
"""

import logging
from argparse import ArgumentDefaultsHelpFormatter

from django.core.management.base import BaseCommand, CommandError

from .exceptions import SGGECError

logger = logging.getLogger(__name__)

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_DIVERGENCE = 4


class GecCommand(BaseCommand):
    requires_system_checks = []
    epilog = None

    def create_parser(self, prog_name, subcommand, **kwargs):
        kwargs.setdefault("formatter_class", ArgumentDefaultsHelpFormatter)
        if self.epilog:
            kwargs.setdefault("epilog", self.epilog)
        return super().create_parser(prog_name, subcommand, **kwargs)

    def execute(self, *args, **options):
        try:
            return super().execute(*args, **options)
        except SGGECError as exc:
            logger.error(f"{type(exc).__name__}: {exc}")
            raise CommandError(str(exc), returncode=exc.exit_code) from exc
        except OSError as exc:
            raise CommandError(str(exc), returncode=EXIT_DATA) from exc

    def success(self, message):
        self.stdout.write(self.style.SUCCESS(message))
