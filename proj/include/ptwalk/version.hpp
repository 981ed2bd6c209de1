#pragma once

#define PTWALK_VERSION "0.1.0"
