#!/usr/bin/env python3
"""
Writes the smooth horizontal gradient image used for the correlation and
histogram experiments.

Usage:
    python make_gradient_bmp.py gradient.bmp [--width 64] [--height 64] [--step 4]
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from mac_cipher.bmp import gradient_image, write_bmp
from mac_cipher.utils import write_atomic


def main():
    parser = argparse.ArgumentParser(description='Write a 24-bit horizontal gradient BMP')
    parser.add_argument('output', help='Path of the BMP file to write')
    parser.add_argument('--width', type=int, default=64)
    parser.add_argument('--height', type=int, default=64)
    parser.add_argument('--step', type=int, default=4, help='Value increase per column (mod 256)')
    args = parser.parse_args()

    if args.width < 1 or args.height < 1:
        parser.error("width and height must be at least 1")

    data = write_bmp(gradient_image(args.width, args.height, args.step))
    write_atomic(args.output, data)
    print(f"Wrote {args.width}x{args.height} gradient ({len(data)} bytes) to {args.output}")


if __name__ == "__main__":
    main()
