#include "doctest.h"

// tests pending
