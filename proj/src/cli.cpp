#include "sftlab/error.hpp"

// implementation pending
