# Main entry point for hd.
import logging
import sys

from henondevaney.lib.henon_cli import HenonCLI


def main():
    # Logs go to stderr; stdout carries only results.
    logging.basicConfig(format='%(asctime)s %(message)s', level=logging.WARNING)
    cli = HenonCLI()
    try:
        cli.do_command(sys.argv[1:])
    except KeyboardInterrupt:
        print('Terminated by Ctrl-C', file=sys.stderr)
        sys.exit(130)


if __name__ == '__main__':
    main()
