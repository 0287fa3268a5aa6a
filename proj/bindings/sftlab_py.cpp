#include <pybind11/pybind11.h>

PYBIND11_MODULE(_core, m) {
  m.doc() = "symbolic-dynamics core (orbit spaces, shadowing, towers)";
  m.attr("__version__") = "0.1.0";
}
