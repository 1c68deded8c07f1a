#pragma once

// Umbrella header: AES-128 block cipher, ECG record handling, PCA
// enrollment, nearest-neighbor identification, the encrypted-record
// pipeline, and the timing harness.

#include "ecgsec/aes.hpp"
#include "ecgsec/bench.hpp"
#include "ecgsec/ecg_data.hpp"
#include "ecgsec/enroll.hpp"
#include "ecgsec/error.hpp"
#include "ecgsec/identify.hpp"
#include "ecgsec/linalg.hpp"
#include "ecgsec/pipeline.hpp"
