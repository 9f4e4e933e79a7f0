#!/usr/bin/python3

from rankshift.cli import main

main()
