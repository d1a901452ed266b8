"""
CSV table formatter

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

"""

import csv
from libopsim.format import Format, plain


class Csv(Format):
    """CSV table formatter class (RFC-4180 quoting, CRLF line ends)"""
    def _writer(self):
        return csv.writer(self._get_io(), lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)

    def format(self, data):
        """Formats a record, or a list of records, as CSV rows"""
        if isinstance(data, (list, tuple)):
            self.format_table(data)
        else:
            self.format_table([data])

    def format_table(self, rows):
        """Formats records with a header line made of the union of their keys"""
        rows = [plain(row) for row in rows]
        if not rows:
            return
        if not isinstance(rows[0], dict):
            writer = self._writer()
            for row in rows:
                writer.writerow(row if isinstance(row, list) else [row])
            return
        header = []
        for row in rows:
            header.extend(key for key in row if key not in header)
        writer = self._writer()
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if row.get(key) is None else self._cell(row[key]) for key in header])

    @staticmethod
    def _cell(value):
        if isinstance(value, float):
            return repr(value)
        if isinstance(value, (dict, list)):
            return str(value)
        return value
