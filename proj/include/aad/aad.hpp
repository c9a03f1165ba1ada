#pragma once

#include "aad/audio/mix.hpp"
#include "aad/audio/spectrogram.hpp"
#include "aad/audio/synth.hpp"
#include "aad/audio/wav_io.hpp"
#include "aad/bench/corpus.hpp"
#include "aad/bench/experiment.hpp"
#include "aad/bench/heatmaps.hpp"
#include "aad/bench/manifest.hpp"
#include "aad/detectors/config_json.hpp"
#include "aad/detectors/detector.hpp"
#include "aad/detectors/model_io.hpp"
#include "aad/features/align.hpp"
#include "aad/features/embedding_io.hpp"
#include "aad/features/reference_extractor.hpp"
#include "aad/metrics/classification.hpp"
#include "aad/metrics/faithfulness.hpp"
#include "aad/metrics/localization.hpp"
#include "aad/metrics/percentile.hpp"
#include "aad/metrics/report.hpp"
#include "aad/metrics/temporal.hpp"
