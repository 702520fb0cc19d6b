#ifndef GLYPHREC_SERIALIZE_HPP
#define GLYPHREC_SERIALIZE_HPP

#include <string>

#include "glyphrec/dataset.hpp"
#include "glyphrec/ensemble.hpp"
#include "glyphrec/mlp.hpp"
#include "glyphrec/svm.hpp"

namespace glyphrec {

// Binary model container: 8-byte magic "GLYPHREC", then format version and
// payload kind as little-endian u32, then the payload. All integers are
// little-endian; doubles travel as their IEEE-754 bit patterns, so a
// save/load round trip reproduces every parameter bit for bit.
inline constexpr char kModelMagic[8] = {'G', 'L', 'Y', 'P', 'H', 'R', 'E', 'C'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

inline constexpr std::uint32_t kKindScaler = 1;
inline constexpr std::uint32_t kKindMlp = 2;
inline constexpr std::uint32_t kKindSvm = 3;
inline constexpr std::uint32_t kKindFusion = 4;

// Payload kind stored in a model file.
std::uint32_t peek_kind(const std::string& path);

void save_scaler(const std::string& path, const ScalerModel& scaler);
ScalerModel load_scaler(const std::string& path);

void save_mlp(const std::string& path, const MlpModel& model);
MlpModel load_mlp(const std::string& path);

void save_svm(const std::string& path, const SvmModel& model);
SvmModel load_svm(const std::string& path);

void save_fusion_weights(const std::string& path, const FusionWeights& weights);
FusionWeights load_fusion_weights(const std::string& path);

// Human-readable dump of an MLP for inspection; the binary container is the
// round-trip format.
std::string mlp_to_json(const MlpModel& model);

// Writes through a temp file in the same directory, then renames over the
// target.
void write_file_atomic(const std::string& path, const std::string& bytes);

}  // namespace glyphrec

#endif  // GLYPHREC_SERIALIZE_HPP
