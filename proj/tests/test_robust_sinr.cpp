#include <doctest.h>
#include "disac/experiments.hpp"
