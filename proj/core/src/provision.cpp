#include "tbrd/provision.hpp"

#include <fstream>
#include <stdexcept>

#include "tbrd/crypto.hpp"

namespace tbrd {

static void check_plan_id(const std::string& s, const char* what) {
  if (s.empty() || s.size() > 20) {
    throw std::invalid_argument(std::string(what) + " must be 1..20 bytes");
  }
}

ProvisionResult plan_mission(const MissionPlan& plan, const Key32& seed) {
  check_plan_id(plan.operator_id, "operator_id");
  check_plan_id(plan.uas_id, "uas_id");
  if (plan.end_ms <= plan.start_ms) {
    throw std::invalid_argument("mission end must follow mission start");
  }
  if (plan.t_int_ms <= 0 || plan.d < 1) throw std::invalid_argument("bad chain parameters");

  tesla::ChainParams params;
  params.t_int_ms = plan.t_int_ms;
  params.d = plan.d;
  params.n = (plan.end_ms - plan.start_ms + plan.t_int_ms - 1) / plan.t_int_ms;
  params.t0_ms = 0;  // set when the first broadcast actually happens

  tesla::KeyChain chain = tesla::generate_chain(seed, params);

  KeysFile kf;
  kf.operator_id = plan.operator_id;
  kf.uas_id = plan.uas_id;
  kf.params = params;
  kf.keys.assign(chain.keys().begin(), chain.keys().end() - 1);  // K_n withheld

  uss::RegistrationRequest reg;
  reg.operator_id = plan.operator_id;
  reg.uas_id = plan.uas_id;
  reg.window_start_ms = plan.start_ms;
  reg.window_end_ms = plan.end_ms;
  reg.k0 = chain.commitment();
  reg.t_int_ms = plan.t_int_ms;
  reg.d = plan.d;

  return ProvisionResult{std::move(chain), std::move(kf), std::move(reg)};
}

Key32 load_or_create_sealed_seed(const std::filesystem::path& path) {
  if (std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    std::string hex;
    in >> hex;
    return key_from_hex(hex);
  }
  Key32 seed = crypto::random_key32();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write seed file: " + path.string());
  out << to_hex(seed) << '\n';
  out.flush();
  std::filesystem::permissions(path, std::filesystem::perms::owner_read |
                                         std::filesystem::perms::owner_write);
  return seed;
}

}  // namespace tbrd
