#include "pathcert/optics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace pathcert::optics {

namespace {

constexpr double kPi = 3.14159265358979323846;

template <class... Ts>
struct Overload : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

bool is_power_of_two(int d) { return d >= 1 && (d & (d - 1)) == 0; }

int bit_of(int value, int k) { return (value >> k) & 1; }

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

}  // namespace

std::string to_string(Port p) {
    return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
}

std::string to_string(Mode m) {
    return to_string(m.port) + (m.pol == Pol::H ? " H" : " V");
}

double ModeState::norm2() const {
    double acc = 0.0;
    for (const auto& [mode, amp] : amps_) acc += std::norm(amp);
    return acc;
}

Eigen::Matrix2cd hwp_jones(double theta_deg) {
    const double t = 2.0 * theta_deg * kPi / 180.0;
    Eigen::Matrix2cd m;
    m << std::cos(t), std::sin(t), std::sin(t), -std::cos(t);
    return m;
}

namespace {

// Apply a per-port 2x2 Jones matrix; `angle_for` returns the HWP angle at a
// port or nullopt to leave the port untouched.
template <class AngleFor>
ModeState apply_plates(const ModeState& in, AngleFor&& angle_for) {
    // gather (H, V) amplitude pairs per port
    std::map<Port, std::pair<Cx, Cx>> fields;
    for (const auto& [mode, amp] : in.data()) {
        auto& f = fields[mode.port];
        (mode.pol == Pol::H ? f.first : f.second) = amp;
    }
    ModeState out;
    for (const auto& [port, f] : fields) {
        const std::optional<double> angle = angle_for(port);
        if (!angle) {
            out.set({port, Pol::H}, f.first);
            out.set({port, Pol::V}, f.second);
            continue;
        }
        const Eigen::Matrix2cd m = hwp_jones(*angle);
        out.set({port, Pol::H}, m(0, 0) * f.first + m(0, 1) * f.second);
        out.set({port, Pol::V}, m(1, 0) * f.first + m(1, 1) * f.second);
    }
    return out;
}

ModeState apply_element(const ModeState& in, const Element& elem) {
    return std::visit(
        Overload{
            [&](const Hwp& e) {
                return apply_plates(in, [&](Port p) -> std::optional<double> {
                    if (e.ports.empty() || std::find(e.ports.begin(), e.ports.end(), p) != e.ports.end())
                        return e.theta_deg;
                    return std::nullopt;
                });
            },
            [&](const HwpArray& e) {
                return apply_plates(in, [&](Port p) -> std::optional<double> {
                    auto it = e.angles_deg.find(p);
                    if (it == e.angles_deg.end()) return std::nullopt;
                    return it->second;
                });
            },
            [&](const BeamDisplacer& e) {
                if (e.offset == Port{0, 0})
                    throw ValidationError("invalid-parameter: beam displacer offset must be nonzero");
                ModeState out;
                for (const auto& [mode, amp] : in.data()) {
                    if (mode.pol == Pol::H)
                        out.add(mode, amp);
                    else
                        out.add({mode.port + e.offset, Pol::V}, amp);
                }
                return out;
            },
            [&](const Pbs& e) {
                ModeState out;
                for (const auto& [mode, amp] : in.data())
                    if (mode.pol == Pol::H) out.add(mode, amp);
                for (const auto& [mode, amp] : in.data()) {
                    if (mode.pol == Pol::H) continue;
                    auto it = e.v_route.find(mode.port);
                    const Port target = it != e.v_route.end() ? it->second : mode.port + e.v_offset;
                    const Mode t{target, Pol::V};
                    if (out.amplitude(t) != Cx(0.0, 0.0))
                        throw LayoutError("layout-error: two beams collide on mode " + to_string(t));
                    out.add(t, amp);
                }
                return out;
            },
            [&](const SlmPhase& e) {
                ModeState out;
                for (const auto& [mode, amp] : in.data()) {
                    auto it = mode.pol == Pol::V ? e.phases.find(mode.port) : e.phases.end();
                    if (it != e.phases.end())
                        out.add(mode, amp * std::polar(1.0, it->second));
                    else
                        out.add(mode, amp);
                }
                return out;
            },
            [&](const PostSelectH&) {
                ModeState out;
                for (const auto& [mode, amp] : in.data())
                    if (mode.pol == Pol::H) out.add(mode, amp);
                return out;
            },
        },
        elem);
}

}  // namespace

ModeState simulate(const Network& net, const ModeState& input) {
    ModeState state = input;
    for (const Element& elem : net.elements) state = apply_element(state, elem);
    return state;
}

Eigen::MatrixXcd transfer_matrix(const Network& net, const std::vector<Mode>& in_modes,
                                 const std::vector<Mode>& out_modes) {
    Eigen::MatrixXcd t(out_modes.size(), in_modes.size());
    for (std::size_t a = 0; a < in_modes.size(); ++a) {
        const ModeState out = simulate(net, ModeState::basis(in_modes[a]));
        for (std::size_t k = 0; k < out_modes.size(); ++k)
            t(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(a)) = out.amplitude(out_modes[k]);
    }
    return t;
}

double max_isometry_deviation(const Eigen::MatrixXcd& t) {
    const Eigen::MatrixXcd gram = t.adjoint() * t;
    return (gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

Port address_port(int address) { return {2 * (address & 7), 2 * (address >> 3)}; }

Port bit_offset(int bit) {
    if (bit < 0) throw ValidationError("invalid-index: negative address bit");
    if (bit < 3) return {1 << (bit + 1), 0};
    return {0, 1 << (bit - 2)};
}

namespace {

int address_bits(int d, int max_d, const char* what) {
    if (!is_power_of_two(d) || d < 2 || d > max_d)
        throw ValidationError(std::string("invalid-dimension: ") + what + " needs a power-of-two d in [2," +
                              std::to_string(max_d) + "], got " + std::to_string(d));
    return std::bit_width(static_cast<unsigned>(d)) - 1;
}

}  // namespace

Network build_source_array(int d) {
    const int n = address_bits(d, 32, "source array");
    Network net;
    net.inputs = {address_port(0)};
    for (int k = 0; k < n; ++k) {
        net.elements.push_back(Hwp{22.5, {}});
        net.elements.push_back(BeamDisplacer{bit_offset(k)});
    }
    for (int a = 0; a < d; ++a) net.outputs.push_back(address_port(a));
    return net;
}

double intensity_regulator_transmission(double phi) {
    const double s = std::sin(phi / 2.0);
    return s * s;
}

Network build_intensity_regulator(double phi) {
    const Port in = address_port(0);
    const Port out{0, 2};
    Network net;
    net.inputs = {in};
    net.outputs = {out};
    net.elements.push_back(Hwp{22.5, {in}});
    net.elements.push_back(SlmPhase{{{in, phi}}});
    net.elements.push_back(Hwp{22.5, {in}});
    net.elements.push_back(Pbs{{0, 2}, {}});
    net.elements.push_back(Hwp{45.0, {out}});
    return net;
}

std::string VerificationReport::summary() const {
    std::string text;
    for (const auto& c : checks) {
        text += c.pass ? "[ ok ] " : "[FAIL] ";
        text += c.name + " @ " + c.stage + ": deviation " + fmt("%.3e", c.deviation) + " (tol " +
                fmt("%.1e", c.tolerance) + ")\n";
    }
    text += pass ? "verification PASSED\n" : "verification FAILED\n";
    return text;
}

namespace {

Pol required_pol(int address, int bit) { return bit_of(address, bit) ? Pol::V : Pol::H; }

struct Rail {
    Port port;
    Pol pol = Pol::H;
    bool live = true;
};

// Reads the interferometric gains a basis input picks up on its way to the
// merge port, by running the already-built routing prefix.
Cx prefix_gain(const SubspaceSetting& s, int address, Pol pol_at_merge) {
    Network prefix;
    prefix.elements.assign(s.network.elements.begin(), s.network.elements.begin() + s.prefix_elements);
    const ModeState out = simulate(prefix, ModeState::basis({address_port(address), Pol::H}));
    return out.amplitude({s.merge_port, pol_at_merge});
}

}  // namespace

SubspaceSetting compile_subspace_routed(int i, int j, int d, int ssm_layer) {
    const int n = address_bits(d, 32, "subspace analyzer");
    if (i < 0 || j < 0 || i >= d || j >= d || i >= j)
        throw ValidationError("invalid-index: need 0 <= i < j < d, got i=" + std::to_string(i) +
                              " j=" + std::to_string(j) + " d=" + std::to_string(d));
    if (ssm_layer < 1 || ssm_layer > n)
        throw ValidationError("invalid-parameter: superposition stage must lie in [1," + std::to_string(n) +
                              "], got " + std::to_string(ssm_layer));

    SubspaceSetting s;
    s.i = i;
    s.j = j;
    s.d = d;
    s.ssm_layer = ssm_layer;

    Rail ri{address_port(i)};
    Rail rj{address_port(j)};
    bool merged = false;
    Rail accept;

    auto& elems = s.network.elements;
    for (int a = 0; a < d; ++a) s.network.inputs.push_back(address_port(a));

    for (int layer = 0; layer < n; ++layer) {
        s.layer_names.push_back("HWPA" + std::to_string(layer + 1));
        if (!merged && layer == ssm_layer) {
            // superposition module: programmable phase plus a plate restricted
            // to the merge port; angles are filled in by configure_projector
            s.merge_port = ri.port;
            s.prefix_elements = static_cast<int>(elems.size());
            s.ssm_slm_index = static_cast<int>(elems.size());
            elems.push_back(SlmPhase{{{s.merge_port, 0.0}}});
            s.ssm_hwp_index = static_cast<int>(elems.size());
            elems.push_back(Hwp{0.0, {s.merge_port}});
            s.roles.push_back("SSM");
            merged = true;
            // the solve in configure_projector places the kept component into
            // the polarization the remaining routing expects here
            accept = Rail{ri.port, required_pol(i, layer)};
            s.accept_pol = accept.pol;
        } else {
            std::map<Port, double> plates;
            bool lifted = false;
            bool parked = false;
            auto route = [&](Rail& rail, int address) {
                if (!rail.live) return;
                if (plates.count(rail.port)) {
                    // both rails share a port before any merge stage: only the
                    // first one keeps routing, the other is deliberately lost
                    rail.live = false;
                    return;
                }
                const Pol req = required_pol(address, layer);
                if (rail.pol != req) {
                    plates[rail.port] = 45.0;
                    lifted = lifted || req == Pol::V;
                    parked = parked || req == Pol::H;
                } else {
                    plates[rail.port] = 0.0;
                }
                rail.pol = req;
            };
            if (merged) {
                route(accept, i);
            } else {
                route(ri, i);
                route(rj, j);
            }
            if (!plates.empty()) elems.push_back(HwpArray{plates});
            s.roles.push_back(lifted ? "theta2@0" : parked ? "theta3@0" : "HWP@0");
        }

        const Port o = bit_offset(layer);
        elems.push_back(BeamDisplacer{Port{-o.x, -o.y}});
        auto shift = [&](Rail& rail) {
            if (rail.live && rail.pol == Pol::V) rail.port = rail.port - o;
        };
        if (merged) {
            shift(accept);
        } else {
            shift(ri);
            shift(rj);
        }
    }

    s.layer_names.push_back("HWP1");
    if (!merged) {
        s.merge_port = ri.port;
        s.prefix_elements = static_cast<int>(elems.size());
        s.ssm_slm_index = static_cast<int>(elems.size());
        elems.push_back(SlmPhase{{{s.merge_port, 0.0}}});
        s.ssm_hwp_index = static_cast<int>(elems.size());
        elems.push_back(Hwp{0.0, {}});
        s.roles.push_back("SSM");
        accept = Rail{ri.port, Pol::V};
        s.accept_pol = Pol::V;
    } else if (accept.pol == Pol::H) {
        elems.push_back(Hwp{45.0, {}});
        s.roles.push_back("HWP1@45");
        accept.pol = Pol::V;
    } else {
        elems.push_back(Hwp{0.0, {}});
        s.roles.push_back("HWP@0");
    }

    elems.push_back(Pbs{Port{0, -2}, {}});
    s.detector = Mode{accept.port + Port{0, -2}, Pol::V};
    s.network.outputs = {s.detector.port};

    s.gain_i = prefix_gain(s, i, Pol::H);
    s.gain_j = prefix_gain(s, j, Pol::V);

    configure_projector(s, Cx(1.0, 0.0), Cx(1.0, 0.0));
    return s;
}

SubspaceSetting compile_subspace(int i, int j, int d) {
    if (i < 0 || j < 0 || i == j) throw ValidationError("invalid-index: need two distinct path labels");
    const int lo = std::min(i, j);
    const int hi = std::max(i, j);
    const int top_bit = std::bit_width(static_cast<unsigned>(lo ^ hi)) - 1;
    return compile_subspace_routed(lo, hi, d, top_bit + 1);
}

void configure_projector(SubspaceSetting& s, Cx alpha, Cx beta) {
    const double norm = std::sqrt(std::norm(alpha) + std::norm(beta));
    if (!(norm > 0.0)) throw ValidationError("invalid-parameter: projector coefficients must not both vanish");
    alpha /= norm;
    beta /= norm;

    const double aa = std::abs(alpha);
    const double bb = std::abs(beta);
    constexpr double kTiny = 1e-300;
    const Cx gi = std::abs(s.gain_i) > 1e-9 ? s.gain_i : Cx(1.0, 0.0);
    const Cx gj = std::abs(s.gain_j) > 1e-9 ? s.gain_j : Cx(1.0, 0.0);

    // The plate sends the accepted polarization component cos(2t) of the
    // incumbent beam and sin(2t) of the merged one into the analyzer output;
    // the programmable phase aligns the merged arm so the detector amplitude
    // becomes conj(alpha)*c_i + conj(beta)*c_j up to a global phase.
    double two_theta;
    Cx kappa;
    Cx phase;
    if (s.accept_pol == Pol::H) {
        two_theta = std::atan2(bb, aa);
        kappa = aa > kTiny ? Cx(gi * aa / std::conj(alpha)) : Cx(1.0, 0.0);
        phase = bb > kTiny ? Cx(kappa * std::conj(beta) / (bb * gj)) : Cx(1.0, 0.0);
    } else {
        two_theta = std::atan2(aa, bb);
        kappa = aa > kTiny ? Cx(gi * aa / std::conj(alpha)) : Cx(1.0, 0.0);
        phase = bb > kTiny ? Cx(-kappa * std::conj(beta) / (bb * gj)) : Cx(1.0, 0.0);
    }

    s.alpha = alpha;
    s.beta = beta;
    s.ssm_theta_deg = two_theta * 90.0 / kPi;
    s.ssm_phi = std::arg(phase);

    const bool final_layer = s.ssm_layer == static_cast<int>(s.layer_names.size()) - 1;
    s.network.elements[static_cast<std::size_t>(s.ssm_slm_index)] = SlmPhase{{{s.merge_port, s.ssm_phi}}};
    s.network.elements[static_cast<std::size_t>(s.ssm_hwp_index)] =
        final_layer ? Hwp{s.ssm_theta_deg, {}} : Hwp{s.ssm_theta_deg, {s.merge_port}};
}

VerificationReport verify_subspace_setting(const SubspaceSetting& setting, int d, Cx alpha, Cx beta) {
    SubspaceSetting s = setting;
    configure_projector(s, alpha, beta);
    alpha = s.alpha;
    beta = s.beta;

    VerificationReport report;
    report.pass = true;
    auto record = [&](std::string name, std::string stage, double deviation, double tol) {
        const bool ok = deviation <= tol;
        report.checks.push_back({std::move(name), std::move(stage), deviation, tol, ok});
        report.pass = report.pass && ok;
    };
    const std::string merge_stage = s.layer_names[static_cast<std::size_t>(s.ssm_layer)];

    Network prefix;
    prefix.elements.assign(s.network.elements.begin(), s.network.elements.begin() + s.prefix_elements);

    // routing: each of the two addressed paths must arrive at the merge port
    // with unit magnitude in its designated polarization
    {
        const ModeState at_merge = simulate(prefix, ModeState::basis({address_port(s.i), Pol::H}));
        const double dev = std::max(std::abs(std::abs(at_merge.amplitude({s.merge_port, Pol::H})) - 1.0),
                                    std::abs(at_merge.amplitude({s.merge_port, Pol::V})));
        record("arrival-i", merge_stage, dev, 1e-9);
    }
    {
        const ModeState at_merge = simulate(prefix, ModeState::basis({address_port(s.j), Pol::H}));
        const double dev = std::max(std::abs(std::abs(at_merge.amplitude({s.merge_port, Pol::V})) - 1.0),
                                    std::abs(at_merge.amplitude({s.merge_port, Pol::H})));
        record("arrival-j", merge_stage, dev, 1e-9);
    }
    {
        double worst = 0.0;
        for (int k = 0; k < d; ++k) {
            if (k == s.i || k == s.j) continue;
            const ModeState at_merge = simulate(prefix, ModeState::basis({address_port(k), Pol::H}));
            const double power = std::norm(at_merge.amplitude({s.merge_port, Pol::H})) +
                                 std::norm(at_merge.amplitude({s.merge_port, Pol::V}));
            worst = std::max(worst, power);
        }
        record("merge-leakage-max", merge_stage, worst, 1e-9);
    }

    // Born rule: detector click probabilities across basis states and
    // superpositions must match |conj(alpha) c_i + conj(beta) c_j|^2
    auto detector_prob = [&](const ModeState& input) {
        return std::norm(simulate(s.network, input).amplitude(s.detector));
    };
    auto expected_prob = [&](Cx ci, Cx cj) { return std::norm(std::conj(alpha) * ci + std::conj(beta) * cj); };
    {
        double worst = 0.0;
        for (int k = 0; k < d; ++k) {
            const double p = detector_prob(ModeState::basis({address_port(k), Pol::H}));
            const double e = expected_prob(k == s.i ? 1.0 : 0.0, k == s.j ? 1.0 : 0.0);
            worst = std::max(worst, std::abs(p - e));
        }
        record("born-basis", "detector", worst, 1e-9);
    }
    {
        const double r = 1.0 / std::sqrt(2.0);
        const std::vector<std::pair<Cx, Cx>> probes = {
            {r, r},
            {r, -r},
            {r, Cx(0.0, r)},
            {r, Cx(0.0, -r)},
            {0.6, 0.8 * std::polar(1.0, 0.7)},
        };
        double worst = 0.0;
        for (const auto& [ci, cj] : probes) {
            ModeState input;
            input.add({address_port(s.i), Pol::H}, ci);
            input.add({address_port(s.j), Pol::H}, cj);
            worst = std::max(worst, std::abs(detector_prob(input) - expected_prob(ci, cj)));
        }
        record("born-superposition", "detector", worst, 1e-9);
    }
    return report;
}

MubNetwork compile_mub_network(int n, const std::vector<double>& phase_profile, double stage_hwp_deg) {
    if (n < 1 || n > 6)
        throw ValidationError("invalid-parameter: interferometer depth must lie in [1,6], got " + std::to_string(n));
    const int d = 1 << n;
    std::vector<double> phases = phase_profile;
    if (phases.empty()) phases.assign(static_cast<std::size_t>(d), 0.0);
    if (static_cast<int>(phases.size()) != d)
        throw ValidationError("invalid-parameter: phase profile needs " + std::to_string(d) + " entries, got " +
                              std::to_string(phases.size()));

    MubNetwork mub;
    mub.n = n;
    mub.phase_profile = phases;
    mub.stage_hwp_deg = stage_hwp_deg;

    auto& net = mub.network;
    for (int a = 0; a < d; ++a) {
        net.inputs.push_back(address_port(a));
        mub.input_modes.push_back({address_port(a), Pol::V});
    }

    {
        std::map<Port, double> profile;
        for (int a = 0; a < d; ++a)
            if (phases[static_cast<std::size_t>(a)] != 0.0)
                profile[address_port(a)] = phases[static_cast<std::size_t>(a)];
        if (!profile.empty()) net.elements.push_back(SlmPhase{profile});
    }

    for (int stage = 0; stage < n; ++stage) {
        std::map<Port, double> plates;
        for (int a = 0; a < d; ++a) {
            const Pol current = stage == 0 ? Pol::V : required_pol(a, stage - 1);
            const Pol req = required_pol(a, stage);
            plates[address_port(a)] = current == req ? (req == Pol::V ? 90.0 : 0.0) : 45.0;
        }
        net.elements.push_back(HwpArray{plates});

        const Port o = bit_offset(stage);
        net.elements.push_back(BeamDisplacer{Port{-o.x, -o.y}});
        net.elements.push_back(Hwp{stage_hwp_deg, {}});
        net.elements.push_back(Pbs{o, {}});
    }

    for (int k = 0; k < d; ++k) {
        net.outputs.push_back(address_port(k));
        mub.output_modes.push_back({address_port(k), required_pol(k, n - 1)});
    }
    return mub;
}

VerificationReport verify_mub_network(const MubNetwork& mub) {
    const int d = 1 << mub.n;
    VerificationReport report;
    report.pass = true;
    auto record = [&](std::string name, double deviation, double tol) {
        const bool ok = deviation <= tol;
        report.checks.push_back({std::move(name), "interferometer", deviation, tol, ok});
        report.pass = report.pass && ok;
    };

    const Eigen::MatrixXcd t = transfer_matrix(mub.network, mub.input_modes, mub.output_modes);
    record("isometry", max_isometry_deviation(t), 1e-10);

    // every stage applies the same 2x2 butterfly to one address bit, so the
    // ideal transfer matrix is its n-fold tensor power times the input phases
    const Eigen::Matrix2cd m = hwp_jones(mub.stage_hwp_deg);
    Eigen::MatrixXcd expected(d, d);
    for (int k = 0; k < d; ++k) {
        for (int a = 0; a < d; ++a) {
            Cx entry(1.0, 0.0);
            for (int s = 0; s < mub.n; ++s) entry *= m(bit_of(k, s), bit_of(a, s));
            expected(k, a) = entry * std::polar(1.0, mub.phase_profile[static_cast<std::size_t>(a)]);
        }
    }
    double worst_row = 0.0;
    for (int k = 0; k < d; ++k) {
        Cx overlap(0.0, 0.0);
        for (int a = 0; a < d; ++a) overlap += std::conj(expected(k, a)) * t(k, a);
        const Cx phase = std::abs(overlap) > 0.0 ? Cx(overlap / std::abs(overlap)) : Cx(1.0, 0.0);
        for (int a = 0; a < d; ++a) worst_row = std::max(worst_row, std::abs(t(k, a) - phase * expected(k, a)));
    }
    record("rows-vs-target", worst_row, 1e-10);

    if (std::abs(mub.stage_hwp_deg - 22.5) < 1e-12) {
        double worst = 0.0;
        for (int k = 0; k < d; ++k)
            for (int a = 0; a < d; ++a) worst = std::max(worst, std::abs(std::norm(t(k, a)) - 1.0 / d));
        record("unbiasedness", worst, 1e-10);
    }
    return report;
}

namespace {

nlohmann::ordered_json port_json(Port p) { return nlohmann::ordered_json::array({p.x, p.y}); }

nlohmann::ordered_json mode_json(Mode m) {
    nlohmann::ordered_json j;
    j["port"] = port_json(m.port);
    j["pol"] = m.pol == Pol::H ? "H" : "V";
    return j;
}

nlohmann::ordered_json element_json(const Element& elem) {
    nlohmann::ordered_json j;
    std::visit(Overload{
                   [&](const Hwp& e) {
                       j["kind"] = "hwp";
                       j["theta_deg"] = e.theta_deg;
                       if (e.ports.empty()) {
                           j["ports"] = "all";
                       } else {
                           auto arr = nlohmann::ordered_json::array();
                           for (Port p : e.ports) arr.push_back(port_json(p));
                           j["ports"] = arr;
                       }
                   },
                   [&](const HwpArray& e) {
                       j["kind"] = "hwp_array";
                       auto arr = nlohmann::ordered_json::array();
                       for (const auto& [port, angle] : e.angles_deg) {
                           nlohmann::ordered_json plate;
                           plate["port"] = port_json(port);
                           plate["theta_deg"] = angle;
                           arr.push_back(plate);
                       }
                       j["plates"] = arr;
                   },
                   [&](const BeamDisplacer& e) {
                       j["kind"] = "bd";
                       j["offset"] = port_json(e.offset);
                   },
                   [&](const Pbs& e) {
                       j["kind"] = "pbs";
                       j["v_offset"] = port_json(e.v_offset);
                       auto arr = nlohmann::ordered_json::array();
                       for (const auto& [from, to] : e.v_route) {
                           nlohmann::ordered_json hop;
                           hop["from"] = port_json(from);
                           hop["to"] = port_json(to);
                           arr.push_back(hop);
                       }
                       j["v_route"] = arr;
                   },
                   [&](const SlmPhase& e) {
                       j["kind"] = "slm";
                       auto arr = nlohmann::ordered_json::array();
                       for (const auto& [port, phi] : e.phases) {
                           nlohmann::ordered_json pixel;
                           pixel["port"] = port_json(port);
                           pixel["phi"] = phi;
                           arr.push_back(pixel);
                       }
                       j["phases"] = arr;
                   },
                   [&](const PostSelectH&) { j["kind"] = "postselect_h"; },
               },
               elem);
    return j;
}

nlohmann::ordered_json network_json(const Network& net) {
    nlohmann::ordered_json j;
    auto ins = nlohmann::ordered_json::array();
    for (Port p : net.inputs) ins.push_back(port_json(p));
    j["inputs"] = ins;
    auto elems = nlohmann::ordered_json::array();
    for (const Element& e : net.elements) elems.push_back(element_json(e));
    j["elements"] = elems;
    auto outs = nlohmann::ordered_json::array();
    for (Port p : net.outputs) outs.push_back(port_json(p));
    j["outputs"] = outs;
    return j;
}

}  // namespace

std::string network_to_json_text(const Network& net) { return network_json(net).dump(2) + "\n"; }

std::string subspace_setting_to_json_text(const SubspaceSetting& s) {
    nlohmann::ordered_json j;
    j["pair"] = nlohmann::ordered_json::array({s.i, s.j});
    j["d"] = s.d;
    auto layers = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < s.layer_names.size(); ++k) {
        nlohmann::ordered_json layer;
        layer["name"] = s.layer_names[k];
        layer["role"] = s.roles[k];
        layers.push_back(layer);
    }
    j["layers"] = layers;
    nlohmann::ordered_json ssm;
    ssm["layer"] = s.layer_names[static_cast<std::size_t>(s.ssm_layer)];
    ssm["port"] = port_json(s.merge_port);
    ssm["theta_deg"] = s.ssm_theta_deg;
    ssm["phi"] = s.ssm_phi;
    j["ssm"] = ssm;
    nlohmann::ordered_json proj;
    proj["alpha"] = nlohmann::ordered_json::array({s.alpha.real(), s.alpha.imag()});
    proj["beta"] = nlohmann::ordered_json::array({s.beta.real(), s.beta.imag()});
    j["projector"] = proj;
    j["detector"] = mode_json(s.detector);
    j["network"] = network_json(s.network);
    return j.dump(2) + "\n";
}

std::string subspace_setting_table_text(const SubspaceSetting& s) {
    auto pad = [](std::string text, std::size_t width) {
        if (text.size() < width) text.append(width - text.size(), ' ');
        return text;
    };
    const std::string pair = "(" + std::to_string(s.i) + "," + std::to_string(s.j) + ")";
    std::size_t width = 10;
    for (const auto& name : s.layer_names) width = std::max(width, name.size() + 2);
    for (const auto& role : s.roles) width = std::max(width, role.size() + 2);

    std::string text = pad("pair", std::max<std::size_t>(8, pair.size() + 2));
    for (const auto& name : s.layer_names) text += pad(name, width);
    text += "\n";
    text += pad(pair, std::max<std::size_t>(8, pair.size() + 2));
    for (const auto& role : s.roles) text += pad(role, width);
    text += "\n";
    text += "SSM: theta = " + fmt("%.6f", s.ssm_theta_deg) + " deg, phi = " + fmt("%.6f", s.ssm_phi) +
            " rad at port " + to_string(s.merge_port) + "\n";
    text += "detector: " + to_string(s.detector) + "\n";
    return text;
}

}  // namespace pathcert::optics
