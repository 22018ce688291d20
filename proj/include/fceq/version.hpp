#pragma once

#define FCEQ_VERSION "0.1.0"
