#include <pybind11/pybind11.h>

PYBIND11_MODULE(_solstab, m) { m.doc() = "solstab"; }
