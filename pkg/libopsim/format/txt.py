"""
Plain text report formatter

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

"""

from libopsim.format import Format, plain


class Txt(Format):
    """Text formatter class: aligned "key: value" lines, nested mappings indented, matrices summarized"""
    INDENT = "  "

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._depth = 0

    def format(self, data):
        self._format(plain(data))

    def _format(self, data):
        if isinstance(data, dict) and {"rows", "cols", "data"} <= set(data):
            self.write("<{}x{} matrix>\n".format(data["rows"], data["cols"]))
        elif isinstance(data, dict):
            if self._depth:
                self.write("\n")
            max_len = max((len(key) for key in data), default=0)
            for key, val in data.items():
                self.write("{}{}:{}".format(self.INDENT * self._depth, key, ' ' * (max_len - len(key) + 1)))
                self._depth += 1
                self._format(val)
                self._depth -= 1
        elif isinstance(data, list) and any(isinstance(val, (dict, list)) for val in data):
            self.write("\n")
            for val in data:
                self.write("{}- ".format(self.INDENT * self._depth))
                self._depth += 1
                self._format(val)
                self._depth -= 1
        elif isinstance(data, list):
            self.write(" ".join(self._scalar(val) for val in data))
            self.write("\n")
        else:
            self.write(self._scalar(data))
            self.write("\n")

    @staticmethod
    def _scalar(value):
        if isinstance(value, float):
            return "{:.12g}".format(value)
        return str(value)
