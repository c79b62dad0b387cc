#!/usr/bin/env python3
"""
Report Generator Tool

Regenerates Markdown/HTML analysis reports from the JSON data files saved by
`mac-cipher analyze --report-dir`.

Usage:
    python report_generate.py <json_file_path> [--output <output_path>] [--html]

Example:
    python report_generate.py reports/analysis-20251128-145548.json
    python report_generate.py reports/analysis-20251128-145548.json --output custom-report.md
"""

import argparse
import json
import os
import sys

# Add mac_cipher to path (parent directory)
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from mac_cipher.analysis import AnalysisReport
from mac_cipher.reporter import AnalysisReporter


def load_json_data(json_filepath):
    """
    Load raw data from JSON file.
    """
    if not os.path.exists(json_filepath):
        print(f"Error: File not found: {json_filepath}")
        sys.exit(1)

    try:
        with open(json_filepath, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        print(f"Error: Invalid JSON file: {e}")
        sys.exit(1)


def generate_report_from_json(json_filepath, output_path=None, html=False):
    """
    Regenerate the report of a saved analysis run. Returns the report path.
    """
    print(f"Loading data from: {json_filepath}")
    full_data = load_json_data(json_filepath)

    session = full_data.get('session', {})
    report = AnalysisReport.from_dict(full_data.get('data', {}))
    config = dict(session.get('config') or {})
    if html:
        config['report_output_formats'] = ['markdown', 'html']

    print(f"Session timestamp: {session.get('timestamp', 'Unknown')}")
    print(f"Source: {session.get('source')}  Encrypted: {session.get('encrypted')}")

    if output_path:
        report_dir = os.path.dirname(output_path) or "."
        output_filename = os.path.basename(output_path)
    else:
        report_dir = os.path.dirname(json_filepath) or "."
        output_filename = None

    reporter = AnalysisReporter(report_dir=report_dir, config=config)
    return reporter.generate_report(
        report,
        source_name=session.get('source'),
        encrypted_name=session.get('encrypted'),
        override_timestamp=session.get('timestamp'),
        save_json=False,  # Do not overwrite JSON when regenerating
        output_filename=output_filename,
    )


def main():
    parser = argparse.ArgumentParser(
        description='Regenerate analysis reports from JSON data files',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python report_generate.py reports/analysis-20251128-145548.json
  python report_generate.py reports/analysis-20251128-145548.json --output custom-report.md
        """
    )
    parser.add_argument('json_file', help='Path to the JSON data file')
    parser.add_argument('--output', '-o', help='Custom output path for the report (optional)', default=None)
    parser.add_argument('--html', action='store_true', help='Also write an HTML version')
    args = parser.parse_args()

    result = generate_report_from_json(args.json_file, args.output, args.html)
    if result:
        print(f"Report written to: {result}")


if __name__ == "__main__":
    main()
