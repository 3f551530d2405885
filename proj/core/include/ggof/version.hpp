#pragma once

#define GGOF_VERSION "0.1.0"
