import io
import json
import logging
import os
from datetime import datetime

import markdown

from . import constants
from .analysis import AnalysisReport, Direction, histogram_distance

logger = logging.getLogger(__name__)

HTML_STYLE = """
<style>
    body { font-family: -apple-system, BlinkMacSystemFont, "Segoe UI", Roboto, Helvetica, Arial, sans-serif; line-height: 1.6; color: #333; max-width: 960px; margin: 0 auto; padding: 20px; }
    h1, h2, h3 { color: #2c3e50; margin-top: 1.5em; }
    h1 { border-bottom: 2px solid #eee; padding-bottom: 10px; }
    h2 { border-bottom: 1px solid #eee; padding-bottom: 5px; }
    table { border-collapse: collapse; width: 100%; margin: 20px 0; }
    th, td { border: 1px solid #ddd; padding: 8px; text-align: left; }
    th { background-color: #f8f9fa; font-weight: bold; }
    tr:nth-child(even) { background-color: #f9f9f9; }
    code { background-color: #f5f5f5; padding: 2px 4px; border-radius: 3px; font-family: monospace; }
</style>
"""


class AnalysisReporter:
    def __init__(self, report_dir=constants.DEFAULT_REPORT_DIR, config=None):
        self.report_dir = report_dir
        self.config = config or {}

        os.makedirs(self.report_dir, exist_ok=True)

    def generate_report(self, report: AnalysisReport, source_name: str = None, encrypted_name: str = None,
                        override_timestamp: str = None, save_json: bool = True, output_filename: str = None) -> str:
        """
        Writes the analysis as Markdown and/or HTML, and the raw data as JSON.

        Args:
            report: The AnalysisReport to render
            source_name: Label of the source input (usually its path)
            encrypted_name: Label of the encrypted input
            override_timestamp: Timestamp string to reuse (for regeneration)
            save_json: Whether to save the raw data to JSON
            output_filename: Custom base filename (without extension)

        Returns the path of the first generated report file, or None.
        """
        if override_timestamp:
            timestamp = override_timestamp
            report_date = datetime.strptime(timestamp, "%Y%m%d-%H%M%S").strftime('%Y-%m-%d %H:%M:%S')
        else:
            timestamp = datetime.now().strftime("%Y%m%d-%H%M%S")
            report_date = datetime.now().strftime('%Y-%m-%d %H:%M:%S')

        if output_filename:
            base_name = output_filename.replace('.md', '').replace('.html', '')
        else:
            base_name = f"analysis-{timestamp}"

        logger.info(f"Generating analysis report: {base_name}")

        f = io.StringIO()
        f.write("# Encryption Analysis Report\n")
        f.write(f"**Date:** {report_date}\n\n")
        self._write_summary(f, report, source_name, encrypted_name)
        self._write_correlation(f, report)
        self._write_histograms(f, report)
        markdown_content = f.getvalue()
        f.close()

        output_formats = self.config.get('report_output_formats', constants.DEFAULT_REPORT_FORMATS)
        generated_files = []

        if 'markdown' in output_formats:
            md_filepath = os.path.join(self.report_dir, f"{base_name}.md")
            with open(md_filepath, "w", encoding='utf-8') as md_file:
                md_file.write(markdown_content)
            generated_files.append(md_filepath)
            logger.info(f"Report generated: {md_filepath}")

        if 'html' in output_formats:
            html_filepath = os.path.join(self.report_dir, f"{base_name}.html")
            html_content = markdown.markdown(markdown_content, extensions=['tables'])
            full_html = (f"<!DOCTYPE html>\n<html>\n<head>\n<meta charset='utf-8'>\n"
                         f"<title>Encryption Analysis Report - {report_date}</title>\n{HTML_STYLE}\n</head>\n"
                         f"<body>\n{html_content}\n</body>\n</html>")
            with open(html_filepath, "w", encoding='utf-8') as html_file:
                html_file.write(full_html)
            generated_files.append(html_filepath)
            logger.info(f"Report generated: {html_filepath}")

        if save_json:
            json_filepath = os.path.join(self.report_dir, f"{base_name}.json")
            self._save_json_data(json_filepath, timestamp, report, source_name, encrypted_name)
            logger.info(f"Raw data saved to: {json_filepath}")

        return generated_files[0] if generated_files else None

    def _save_json_data(self, filepath, timestamp, report, source_name, encrypted_name):
        data = {
            "session": {
                "timestamp": timestamp,
                "generated_at": datetime.now().isoformat(),
                "source": source_name,
                "encrypted": encrypted_name,
                "config": self.config,
            },
            "data": report.to_dict(),
        }
        with open(filepath, 'w', encoding='utf-8') as f:
            json.dump(data, f, indent=2, default=str)

    def _write_summary(self, f, report, source_name, encrypted_name):
        f.write("## 1. Summary\n")
        f.write(f"- **Source:** `{source_name or 'unknown'}`\n")
        f.write(f"- **Encrypted:** `{encrypted_name or 'unknown'}`\n")
        snr = "undefined (identical inputs)" if report.snr is None else f"{report.snr:.6f} db"
        f.write(f"- **SNR:** {snr}\n")
        if report.diff_ratio is not None:
            f.write(f"- **Changed bytes:** {report.diff_ratio * 100:.2f}%\n")
        f.write("\n")
        f.write("> SNR is the plain ratio sum(E^2) / sum((E - S)^2). The \"db\" label is kept for "
                "comparison with published figures; no logarithm is applied. Lower means more distortion.\n\n")

    def _write_correlation(self, f, report):
        f.write("## 2. Neighbour Pixel Correlation\n")
        if not report.correlation and not report.source_correlation:
            f.write("Not computed (inputs were not analysed as images).\n\n")
            return

        f.write("| Direction | Source r | Encrypted r |\n")
        f.write("|---|---|---|\n")
        for direction in Direction:
            source_r = report.source_correlation.get(direction)
            encrypted_r = report.correlation.get(direction)
            f.write(f"| {direction.value.capitalize()} | {self._fmt(source_r)} | {self._fmt(encrypted_r)} |\n")
        f.write("\n")

    def _write_histograms(self, f, report):
        f.write("## 3. Histograms\n")
        source, encrypted = report.histogram_source, report.histogram_encrypted
        if not source or not encrypted:
            f.write("No histogram data.\n\n")
            return

        f.write("| | Source | Encrypted |\n")
        f.write("|---|---|---|\n")
        f.write(f"| Distinct values | {sum(1 for c in source if c)} | {sum(1 for c in encrypted if c)} |\n")
        f.write(f"| Most frequent value | {self._mode(source)} | {self._mode(encrypted)} |\n")
        f.write(f"| Largest bin | {max(source)} | {max(encrypted)} |\n")
        f.write(f"\nL1 distance between the histograms: **{histogram_distance(source, encrypted)}**\n\n")

    @staticmethod
    def _mode(counts):
        return max(range(len(counts)), key=lambda v: counts[v])

    @staticmethod
    def _fmt(value):
        return "n/a" if value is None else f"{value:.6f}"
