#pragma once

#define QUADTHERM_VERSION_MAJOR 0
#define QUADTHERM_VERSION_MINOR 1
#define QUADTHERM_VERSION_PATCH 0
#define QUADTHERM_VERSION "0.1.0"
