#!/usr/bin/env python3
"""
Entry point for the MAC-keyed cipher toolkit.
"""
from mac_cipher.cli import main

if __name__ == "__main__":
    main()
