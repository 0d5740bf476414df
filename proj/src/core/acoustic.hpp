// Copyright (c) 2026 The gradstyle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Non-autoregressive acoustic model: feed-forward Transformer encoder and
// decoder whose normalisation sites are conditioned on the global style
// vector, with pitch and duration predictors and length regulation.

#ifndef GSA_CORE_ACOUSTIC_HPP_
#define GSA_CORE_ACOUSTIC_HPP_

#include <optional>
#include <string>
#include <vector>

#include "core/dsp.hpp"
#include "core/layers.hpp"

namespace gsa {

// Character inventory; id 0 is the pad symbol.
class SymbolTable {
 public:
  SymbolTable();
  static const SymbolTable& standard();

  int size() const { return static_cast<int>(symbols_.size()); }
  int pad_id() const { return 0; }
  // Lower-cases and maps every character; unknown characters are an error.
  std::vector<int> encode(const std::string& text) const;
  std::string decode(const std::vector<int>& ids) const;
  // Inventory as a single string (pad first), stored in checkpoints.
  const std::string& inventory() const { return symbols_; }

 private:
  std::string symbols_;
  int index_[256];
};

struct AcousticConfig {
  int d_model = 384;
  int n_enc_blocks = 4;
  int n_dec_blocks = 4;
  int conv_kernel = 3;
  int n_heads = 2;
  int n_mels = 80;
  int d_style = 384;
  int d_ffn = 1536;
  int predictor_filters = 256;
  double dropout_rate = 0.1;
  int n_symbols = 0;  // filled from the symbol table when 0

  void validate() const;
};

std::vector<ParamShape> acoustic_param_shapes(const AcousticConfig& cfg);

// Sinusoidal position table, rows x dim.
Matrix sinusoid_positions(Eigen::Index rows, Eigen::Index dim);

// Conditional layer normalisation with explicit projection matrices
// (d_style x d_model each); w is 1 x d_style.
ad::Var cln(const ad::Var& x, const ad::Var& w, const ad::Var& e_gamma,
            const ad::Var& e_beta);

// Pre-norm FFT block: y = x + MHA(CLN(x)); z = y + ConvFFN(CLN(y)).
// A null `w` normalises without conditioning (plain unit LayerNorm).
ad::Var fft_block(Binder& p, const ad::Var& x, const ad::Var* w,
                  const std::string& prefix, const AcousticConfig& cfg,
                  const nn::Dropout& drop);

// Row i repeated durations[i] times.
ad::Var length_regulate(const ad::Var& h, const std::vector<int>& durations);
Matrix length_regulate(const Matrix& h, const std::vector<int>& durations);

// conv(k3) -> gelu -> LN -> dropout, twice, then affine to one value per row.
ad::Var variance_predictor(Binder& p, const ad::Var& h,
                           const std::string& prefix, const AcousticConfig& cfg,
                           const nn::Dropout& drop);
ad::Var predict_pitch(Binder& p, const ad::Var& h, const AcousticConfig& cfg,
                      const nn::Dropout& drop);
ad::Var predict_duration(Binder& p, const ad::Var& h, const AcousticConfig& cfg,
                         const nn::Dropout& drop);

// log(frames + 1) prediction -> frames: round-half-to-even, at least one
// frame for non-pad symbols, zero for pad.
std::vector<int> durations_from_log(const std::vector<double>& log_durations,
                                    const std::vector<int>& symbol_ids,
                                    int pad_id);

struct Teacher {
  std::vector<int> durations;
  std::vector<double> pitch;  // normalised log-F0 per symbol
};

struct AcousticOutput {
  ad::Var mel;         // T x n_mels
  ad::Var pitch_pred;  // S x 1
  ad::Var logdur_pred; // S x 1
  std::vector<int> durations;
};

AcousticOutput acoustic_forward(Binder& p, const std::vector<int>& symbols,
                                const ad::Var& w, const AcousticConfig& cfg,
                                const Teacher* teacher,
                                const nn::Dropout& drop);

struct SynthesisResult {
  MelSpectrogram mel;
  std::vector<double> pitch_pred;
  std::vector<double> logdur_pred;
  std::vector<int> durations;
};

// Evaluation-mode synthesis.
SynthesisResult synthesize_mel(const ParamTable& params,
                               const std::vector<int>& symbols,
                               const RowVector& style,
                               const AcousticConfig& cfg,
                               const MelConfig& mel_cfg,
                               const Teacher* teacher = nullptr);

}  // namespace gsa

#endif  // GSA_CORE_ACOUSTIC_HPP_
