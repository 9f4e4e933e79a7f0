import os
import sys


def _use_color(stream=sys.stdout):
    """Escape codes only go to a terminal, and never when NO_COLOR is set."""
    if os.environ.get('NO_COLOR'):
        return False
    return hasattr(stream, 'isatty') and stream.isatty()


class Color:
    """
    Terminal colors of the session banners, the top window listing and
    the time report. All of them are empty strings off a terminal.
    """

    codes = {
        'Bold': '\x1b[1m',
        'Red': '\x1b[31m',
        'Yellow': '\x1b[33m',
        'Reset': '\x1b[0m',
    }

    Bold = Red = Yellow = Reset = ''

    @classmethod
    def enable(cls, enabled=True):
        for name, code in cls.codes.items():
            setattr(cls, name, code if enabled else '')


Color.enable(_use_color())
