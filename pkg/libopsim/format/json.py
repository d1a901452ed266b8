"""
JSON report formatter

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

"""

from json import dumps
from libopsim.format import Format, plain


class Json(Format):
    """JSON report formatter class: UTF-8, sorted keys, shortest round-trip floats"""
    def format(self, data):
        """Formats data to JSON"""
        r = dumps(plain(data), sort_keys=True, indent=4, ensure_ascii=False, allow_nan=False)
        self.write(r)
        self.write("\n")

    def format_table(self, rows):
        """Formats a list of records to a JSON array"""
        self.format(list(rows))
