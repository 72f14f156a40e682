"""Command-line frontend."""

def main(argv=None):
    from linf.cli.main import main as _main
    return _main(argv)
