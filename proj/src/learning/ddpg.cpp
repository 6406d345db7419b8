#include "netgame/learning/ddpg.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "netgame/common/binary_io.hpp"
#include "netgame/common/error.hpp"

namespace netgame::learning {

void DDPGConfig::validate() const {
  for (int h : hidden) require(h > 0, "DDPGConfig: hidden widths must be positive");
  require(actor_lr > 0.0 && critic_lr > 0.0, "DDPGConfig: learning rates must be positive");
  require(tau > 0.0 && tau <= 1.0, "DDPGConfig: tau must lie in (0, 1]");
  if (gamma) require(*gamma >= 0.0 && *gamma < 1.0, "DDPGConfig: gamma must lie in [0, 1)");
  require(batch_size > 0, "DDPGConfig: batch_size must be positive");
  require(buffer_capacity > 0, "DDPGConfig: buffer_capacity must be positive");
  require(sigma_start >= 0.0 && sigma_end >= 0.0, "DDPGConfig: exploration sigma must be >= 0");
  require(obs_scale > 0.0 && reward_scale > 0.0, "DDPGConfig: scales must be positive");
}

std::pair<double, Grads> actor_objective_gradient(const Net& actor, const Eigen::MatrixXd& obs,
                                                  const CriticFn& critic) {
  Net::Tape tape;
  const Eigen::MatrixXd actions = actor.forward(obs, tape);
  const auto [q, dq_da] = critic(obs, actions);
  const double batch = static_cast<double>(obs.cols());
  auto grads = actor.backward(tape, dq_da / batch).first;
  return {q.mean(), std::move(grads)};
}

double actor_ascent_step(Net& actor, Adam& optimizer, const Eigen::MatrixXd& obs,
                         const CriticFn& critic) {
  auto [objective, grads] = actor_objective_gradient(actor, obs, critic);
  if (!std::isfinite(objective)) throw Fault("actor update: non-finite objective");
  nn::scale(grads, -1.0);
  nn::adam_step(actor, grads, optimizer);
  if (!actor.all_finite()) throw Fault("actor update: non-finite actor parameters");
  return objective;
}

DDPGAgent::DDPGAgent(int obs_dim, Eigen::VectorXd action_low, Eigen::VectorXd action_high,
                     int critic_action_dim, int own_action_offset, double gamma,
                     const DDPGConfig& config, Rng& init_rng)
    : critic_action_dim_(critic_action_dim),
      own_action_offset_(own_action_offset),
      gamma_(config.gamma.value_or(gamma)),
      config_(config) {
  config_.validate();
  const int action_dim = static_cast<int>(action_low.size());
  require(obs_dim > 0 && action_dim > 0, "DDPGAgent: dims must be positive");
  require(own_action_offset >= 0 && own_action_offset + action_dim <= critic_action_dim,
          "DDPGAgent: own action slice must fit inside the critic action");
  require(gamma_ >= 0.0 && gamma_ < 1.0, "DDPGAgent: gamma must lie in [0, 1)");

  std::vector<int> actor_dims{obs_dim};
  actor_dims.insert(actor_dims.end(), config_.hidden.begin(), config_.hidden.end());
  actor_dims.push_back(action_dim);
  std::vector<int> critic_dims{obs_dim + critic_action_dim};
  critic_dims.insert(critic_dims.end(), config_.hidden.begin(), config_.hidden.end());
  critic_dims.push_back(1);

  actor_ = Net(actor_dims, config_.activation, nn::Output::ScaledTanh, action_low, action_high);
  critic_ = Net(critic_dims, config_.activation, nn::Output::Linear);
  actor_.initialize(init_rng);
  critic_.initialize(init_rng);
  target_actor_ = actor_;
  target_critic_ = critic_;
  actor_opt_ = Adam(actor_, config_.actor_lr);
  critic_opt_ = Adam(critic_, config_.critic_lr);
  set_exploration_fraction(config_.sigma_start);
}

DDPGAgent DDPGAgent::single(int obs_dim, Eigen::VectorXd action_low, Eigen::VectorXd action_high,
                            double gamma, const DDPGConfig& config, Rng& init_rng) {
  const int action_dim = static_cast<int>(action_low.size());
  return DDPGAgent(obs_dim, std::move(action_low), std::move(action_high), action_dim, 0, gamma,
                   config, init_rng);
}

void DDPGAgent::set_exploration_fraction(double fraction) {
  require(fraction >= 0.0, "DDPGAgent: exploration fraction must be >= 0");
  sigma_ = fraction * (actor_.high() - actor_.low());
}

Eigen::VectorXd DDPGAgent::select_action(const Eigen::VectorXd& obs, bool explore, Rng& rng) const {
  require(obs.size() == obs_dim(), "select_action: observation length " +
                                       std::to_string(obs.size()) + ", expected " +
                                       std::to_string(obs_dim()));
  Eigen::VectorXd a = actor_.forward(Eigen::VectorXd(obs * config_.obs_scale));
  if (explore) {
    for (Eigen::Index k = 0; k < a.size(); ++k) a[k] += sigma_[k] * standard_normal(rng);
  }
  a = a.cwiseMax(actor_.low()).cwiseMin(actor_.high());
  if (!a.allFinite()) throw Fault("select_action: non-finite action");
  return a;
}

Eigen::MatrixXd DDPGAgent::act(const Eigen::MatrixXd& obs) const {
  return actor_.forward(Eigen::MatrixXd(obs * config_.obs_scale));
}

Eigen::MatrixXd DDPGAgent::target_act(const Eigen::MatrixXd& obs) const {
  return target_actor_.forward(Eigen::MatrixXd(obs * config_.obs_scale));
}

Eigen::MatrixXd DDPGAgent::critic_input(const Eigen::MatrixXd& obs,
                                        const Eigen::MatrixXd& actions) const {
  require(obs.rows() == obs_dim() && actions.rows() == critic_action_dim_ &&
              obs.cols() == actions.cols(),
          "DDPGAgent: critic input shape mismatch");
  Eigen::MatrixXd x(obs.rows() + actions.rows(), obs.cols());
  x << obs * config_.obs_scale, actions;
  return x;
}

Eigen::RowVectorXd DDPGAgent::q_value(const Eigen::MatrixXd& obs,
                                      const Eigen::MatrixXd& actions) const {
  return critic_.forward(critic_input(obs, actions)).row(0);
}

Eigen::RowVectorXd DDPGAgent::target_q_value(const Eigen::MatrixXd& obs,
                                             const Eigen::MatrixXd& actions) const {
  return target_critic_.forward(critic_input(obs, actions)).row(0);
}

Eigen::VectorXd DDPGAgent::critic_target(const Batch& batch) const {
  require(critic_action_dim_ == action_dim(),
          "critic_target: joint critics need the next joint action from the caller");
  return critic_target(batch, target_act(batch.next_obs));
}

Eigen::VectorXd DDPGAgent::critic_target(const Batch& batch,
                                         const Eigen::MatrixXd& next_actions) const {
  require(batch.size() > 0, "critic_target: empty batch");
  const Eigen::VectorXd next_q = target_q_value(batch.next_obs, next_actions).transpose();
  const Eigen::VectorXd alive = Eigen::VectorXd::Ones(batch.size()) - batch.terminal;
  return config_.reward_scale * batch.rewards + gamma_ * alive.cwiseProduct(next_q);
}

double DDPGAgent::update_critic(const Batch& batch, const Eigen::VectorXd& targets) {
  require(batch.size() > 0 && targets.size() == batch.size(),
          "update_critic: targets must match the batch");
  Net::Tape tape;
  const Eigen::RowVectorXd q = critic_.forward(critic_input(batch.obs, batch.actions), tape).row(0);
  const Eigen::RowVectorXd diff = q - targets.transpose();
  const double n = static_cast<double>(batch.size());
  const double loss = diff.squaredNorm() / n;
  if (!std::isfinite(loss)) {
    std::ostringstream msg;
    msg << "update_critic: non-finite loss (batch " << batch.size() << ", max |Q| "
        << q.cwiseAbs().maxCoeff() << ", max |y| " << targets.cwiseAbs().maxCoeff()
        << ", step " << critic_opt_.step << ")";
    throw Fault(msg.str());
  }
  const auto grads = critic_.backward(tape, Eigen::MatrixXd(2.0 * diff / n)).first;
  nn::adam_step(critic_, grads, critic_opt_);
  if (!critic_.all_finite()) throw Fault("update_critic: non-finite critic parameters");
  return loss;
}

CriticFn DDPGAgent::critic_fn(const Eigen::MatrixXd& joint_actions) const {
  require(joint_actions.rows() == critic_action_dim_, "critic_fn: joint action rows mismatch");
  return [this, joint_actions](const Eigen::MatrixXd& obs, const Eigen::MatrixXd& own) {
    const int adim = action_dim();
    Eigen::MatrixXd actions = joint_actions;
    actions.middleRows(own_action_offset_, adim) = own;
    Eigen::MatrixXd x(obs.rows() + actions.rows(), obs.cols());
    x << obs, actions;
    Net::Tape tape;
    Eigen::RowVectorXd q = critic_.forward(x, tape).row(0);
    const Eigen::MatrixXd dx =
        critic_.backward(tape, Eigen::MatrixXd::Ones(1, obs.cols())).second;
    return std::pair<Eigen::RowVectorXd, Eigen::MatrixXd>{
        std::move(q), dx.middleRows(obs.rows() + own_action_offset_, adim)};
  };
}

double DDPGAgent::update_actor(const Batch& batch) {
  require(batch.size() > 0, "update_actor: empty batch");
  const Eigen::MatrixXd obs = batch.obs * config_.obs_scale;
  return actor_ascent_step(actor_, actor_opt_, obs, critic_fn(batch.actions));
}

void DDPGAgent::soft_update_targets() {
  nn::soft_update(target_actor_, actor_, config_.tau);
  nn::soft_update(target_critic_, critic_, config_.tau);
}

void DDPGAgent::save(std::ostream& out) const {
  io::write_pod<std::uint64_t>(out, config_.hidden.size());
  for (int h : config_.hidden) io::write_pod<std::int32_t>(out, h);
  io::write_pod<std::int32_t>(out, static_cast<std::int32_t>(config_.activation));
  io::write_pod(out, config_.actor_lr);
  io::write_pod(out, config_.critic_lr);
  io::write_pod(out, config_.tau);
  io::write_pod<std::uint8_t>(out, config_.gamma ? 1 : 0);
  io::write_pod(out, config_.gamma.value_or(0.0));
  io::write_pod<std::uint64_t>(out, config_.batch_size);
  io::write_pod<std::uint64_t>(out, config_.buffer_capacity);
  io::write_pod<std::uint64_t>(out, config_.warmup_steps);
  io::write_pod(out, config_.sigma_start);
  io::write_pod(out, config_.sigma_end);
  io::write_pod(out, config_.obs_scale);
  io::write_pod(out, config_.reward_scale);
  io::write_pod<std::int32_t>(out, critic_action_dim_);
  io::write_pod<std::int32_t>(out, own_action_offset_);
  io::write_pod(out, gamma_);
  io::write_dense(out, sigma_);
  actor_.save(out);
  critic_.save(out);
  target_actor_.save(out);
  target_critic_.save(out);
  actor_opt_.save(out);
  critic_opt_.save(out);
}

DDPGAgent DDPGAgent::load(std::istream& in) {
  DDPGAgent a;
  const auto n_hidden = io::read_pod<std::uint64_t>(in);
  a.config_.hidden.resize(n_hidden);
  for (auto& h : a.config_.hidden) h = io::read_pod<std::int32_t>(in);
  a.config_.activation = static_cast<nn::Hidden>(io::read_pod<std::int32_t>(in));
  a.config_.actor_lr = io::read_pod<double>(in);
  a.config_.critic_lr = io::read_pod<double>(in);
  a.config_.tau = io::read_pod<double>(in);
  const bool has_gamma = io::read_pod<std::uint8_t>(in) != 0;
  const double gamma = io::read_pod<double>(in);
  if (has_gamma) a.config_.gamma = gamma;
  a.config_.batch_size = io::read_pod<std::uint64_t>(in);
  a.config_.buffer_capacity = io::read_pod<std::uint64_t>(in);
  a.config_.warmup_steps = io::read_pod<std::uint64_t>(in);
  a.config_.sigma_start = io::read_pod<double>(in);
  a.config_.sigma_end = io::read_pod<double>(in);
  a.config_.obs_scale = io::read_pod<double>(in);
  a.config_.reward_scale = io::read_pod<double>(in);
  a.critic_action_dim_ = io::read_pod<std::int32_t>(in);
  a.own_action_offset_ = io::read_pod<std::int32_t>(in);
  a.gamma_ = io::read_pod<double>(in);
  a.sigma_ = io::read_dense<Eigen::VectorXd>(in);
  a.actor_ = Net::load(in);
  a.critic_ = Net::load(in);
  a.target_actor_ = Net::load(in);
  a.target_critic_ = Net::load(in);
  a.actor_opt_ = Adam::load(in);
  a.critic_opt_ = Adam::load(in);
  return a;
}

}  // namespace netgame::learning
