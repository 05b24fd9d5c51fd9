#include "augsens/json_io.hpp"

namespace augsens {

void to_json(nlohmann::json& j, const HyperParams& hp) {
  j = nlohmann::json{{"optimizer", optimizer_name(hp.optimizer)},
                     {"epochs", hp.epochs},
                     {"learning_rate", hp.learning_rate},
                     {"batch_size", hp.batch_size}};
}

void from_json(const nlohmann::json& j, HyperParams& hp) {
  hp.optimizer = optimizer_from_name(j.at("optimizer").get<std::string>());
  hp.epochs = j.at("epochs").get<int>();
  hp.learning_rate = j.at("learning_rate").get<double>();
  hp.batch_size = j.at("batch_size").get<int>();
}

void to_json(nlohmann::json& j, const AugVector& v) { j = v.to_string(); }

void from_json(const nlohmann::json& j, AugVector& v) {
  v = AugVector::from_string(j.get<std::string>());
}

void to_json(nlohmann::json& j, const AugmentationParams& p) {
  j = nlohmann::json{{"probability", p.probability},
                     {"blur_kernel_sizes", p.blur_kernel_sizes},
                     {"gaussian_blur_kernel_sizes", p.gaussian_blur_kernel_sizes},
                     {"downscale_factor", p.downscale_factor},
                     {"gauss_noise_var_min", p.gauss_noise_var_min},
                     {"gauss_noise_var_max", p.gauss_noise_var_max},
                     {"shift_limit", p.shift_limit},
                     {"scale_limit", p.scale_limit},
                     {"rotate_limit_deg", p.rotate_limit_deg}};
}

void from_json(const nlohmann::json& j, AugmentationParams& p) {
  j.at("probability").get_to(p.probability);
  j.at("blur_kernel_sizes").get_to(p.blur_kernel_sizes);
  j.at("gaussian_blur_kernel_sizes").get_to(p.gaussian_blur_kernel_sizes);
  j.at("downscale_factor").get_to(p.downscale_factor);
  j.at("gauss_noise_var_min").get_to(p.gauss_noise_var_min);
  j.at("gauss_noise_var_max").get_to(p.gauss_noise_var_max);
  j.at("shift_limit").get_to(p.shift_limit);
  j.at("scale_limit").get_to(p.scale_limit);
  j.at("rotate_limit_deg").get_to(p.rotate_limit_deg);
}

}  // namespace augsens
