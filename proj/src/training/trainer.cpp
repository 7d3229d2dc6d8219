#include "winnav/training/trainer.hpp"

#include <sstream>

#include "winnav/eval/metrics.hpp"
#include "winnav/util/text_io.hpp"

namespace winnav {

nn::Tensor il_loss(nn::Tape& tape, const Rollout& rollout, double goal_coef) {
  nn::Tensor total = tape.constant_scalar(0.0);
  for (const StepRecord& rec : rollout.steps) {
    if (!rec.action_dist.valid()) throw UsageError("il_loss: rollout has no distributions");
    total = nn::add(total, nn::cross_entropy_rows(rec.action_dist, {rec.teacher}));
    if (rec.has_goal && goal_coef > 0.0)
      total = nn::add(total, nn::scale(nn::cross_entropy_rows(rec.goal_dist, {rec.goal_cell}), goal_coef));
  }
  return total;
}

std::vector<double> discounted_returns(const Rollout& rollout, double gamma) {
  std::vector<double> returns(rollout.steps.size(), 0.0);
  double acc = 0.0;
  for (int t = static_cast<int>(rollout.steps.size()) - 1; t >= 0; --t) {
    acc = rollout.steps[static_cast<std::size_t>(t)].reward + gamma * acc;
    returns[static_cast<std::size_t>(t)] = acc;
  }
  return returns;
}

nn::Tensor a2c_loss(nn::Tape& tape, const Rollout& rollout, const A2cConfig& cfg) {
  std::vector<double> returns = discounted_returns(rollout, cfg.gamma);
  nn::Tensor total = tape.constant_scalar(0.0);
  for (std::size_t t = 0; t < rollout.steps.size(); ++t) {
    const StepRecord& rec = rollout.steps[t];
    if (!rec.action_dist.valid() || !rec.value_tensor.valid())
      throw UsageError("a2c_loss: rollout lacks model tensors");
    // policy gradient: advantage-weighted negative log-likelihood of the
    // sampled action, advantage treated as a constant
    double advantage = returns[t] - rec.value;
    total = nn::add(total, nn::scale(nn::cross_entropy_rows(rec.action_dist, {rec.chosen}), advantage));
    // value regression toward the return
    nn::Tensor diff = nn::sub(rec.value_tensor, tape.constant_scalar(returns[t]));
    total = nn::add(total, nn::scale(nn::elementwise_mul(diff, diff), cfg.value_coef));
  }
  if (cfg.lambda_il > 0.0) total = nn::add(total, nn::scale(il_loss(tape, rollout), cfg.lambda_il));
  return total;
}

AgentTrainResult train_agent(const Dataset& ds, const PredictorNet* predictor,
                             const AgentTrainConfig& cfg) {
  if (ds.train.empty()) throw DataError("train_agent: empty training split");
  if (cfg.agent.use_locality && cfg.train_map == MapType::kPredicted && !predictor)
    throw DataError("train_agent: WIN configuration requires a predictor checkpoint");

  nn::ParamStore store(Rng::mix(cfg.seed) ^ 0x6167656eull /* "agen" */);
  AgentModel model(store, cfg.agent, /*create=*/true);
  nn::AdamW opt({.lr = cfg.lr, .weight_decay = cfg.weight_decay});
  Rng rng = Rng::stream(cfg.seed, 0x61747261696eull);

  MapType map = cfg.agent.use_locality ? cfg.train_map : MapType::kNone;
  RunnerConfig rcfg = cfg.runner;
  rcfg.map_seed = cfg.seed;
  EpisodeRunner runner(&model, predictor, map, rcfg);

  AgentTrainResult result;
  std::ostringstream log;
  log << "update,phase,loss,val_sr,val_spl\n";
  nn::ParamStore best = store;
  double best_spl = -1.0, best_sr = 0.0;

  for (int update = 0; update < cfg.updates; ++update) {
    bool il_phase = update % 2 == 0;
    store.zero_grads();
    double loss_sum = 0.0;
    double entropy_sum = 0.0;
    int entropy_n = 0;
    for (int b = 0; b < cfg.batch; ++b) {
      const Episode& ep = ds.train[rng.uniform_int(ds.train.size())];
      const GeneratedHouse& gh = ds.houses[static_cast<std::size_t>(ep.house_id)];
      nn::Tape tape;
      Rollout ro = runner.run(tape, gh, ep, il_phase ? PolicyKind::kTeacher : PolicyKind::kSample,
                              &rng);
      nn::Tensor loss = il_phase ? il_loss(tape, ro, cfg.goal_coef) : a2c_loss(tape, ro, cfg.a2c);
      nn::Tensor scaled = nn::scale(loss, 1.0 / static_cast<double>(cfg.batch));
      loss_sum += loss.scalar();
      for (const StepRecord& rec : ro.steps) {
        entropy_sum += rec.entropy;
        ++entropy_n;
      }
      tape.backward(scaled);  // gradients accumulate across the batch
    }
    opt.step(store);
    double mean_loss = loss_sum / cfg.batch;
    (il_phase ? result.il_losses : result.rl_losses).push_back(mean_loss);
    result.entropies.push_back(entropy_n ? entropy_sum / entropy_n : 0.0);

    if ((update + 1) % cfg.eval_interval == 0 || update + 1 == cfg.updates) {
      EvalReport rep = evaluate_agent(store, cfg.agent, predictor, ds, ds.val_unseen,
                                      cfg.agent.use_locality ? cfg.train_map : MapType::kNone,
                                      rcfg, static_cast<std::size_t>(cfg.eval_episodes));
      log << (update + 1) << "," << (il_phase ? "il" : "rl") << "," << fmt_fixed4(mean_loss) << ","
          << fmt_fixed4(rep.sr) << "," << fmt_fixed4(rep.spl) << "\n";
      if (rep.spl > best_spl) {
        best_spl = rep.spl;
        best_sr = rep.sr;
        best = store;
      }
    }
  }

  result.params = std::move(best);
  result.log_csv = log.str();
  result.best_spl = best_spl;
  result.best_sr = best_sr;
  return result;
}

}  // namespace winnav
