from twincut.cli import run

run()
