#pragma once

// Jones-calculus simulation of optical networks over (spatial port x
// polarization) modes, plus compilers for the photon-pair source array, the
// per-beam intensity regulator, two-path subspace analyzers, and the
// Walsh-type MUB measurement cascades - each paired with a simulator-backed
// verifier.
//
// Conventions fixed here and relied on by every compiled table:
//   - A beam displacer moves the V-polarized component by its offset and
//     leaves H in place.
//   - hwp_jones(theta) = [[cos 2t, sin 2t], [sin 2t, -cos 2t]] (degrees), so
//     0 deg passes H and sign-flips V, 45 deg swaps H and V.
//   - Ports live on an abstract integer lattice; beam address a sits at
//     pos(a) = (2*(a & 7), 2*(a >> 3)) (a 4x8 grid of pitch 2 at d=32).

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "pathcert/errors.hpp"

namespace pathcert::optics {

using Cx = std::complex<double>;

struct Port {
    int x = 0;
    int y = 0;
    auto operator<=>(const Port&) const = default;
};

inline Port operator+(Port a, Port b) { return {a.x + b.x, a.y + b.y}; }
inline Port operator-(Port a, Port b) { return {a.x - b.x, a.y - b.y}; }

enum class Pol : int { H = 0, V = 1 };

struct Mode {
    Port port;
    Pol pol = Pol::H;
    auto operator<=>(const Mode&) const = default;
};

std::string to_string(Port p);
std::string to_string(Mode m);

/// Sparse complex amplitude field over modes. Norm may drop below 1 after
/// post-selection; it never grows.
class ModeState {
public:
    static ModeState basis(Mode m) {
        ModeState s;
        s.set(m, 1.0);
        return s;
    }

    Cx amplitude(Mode m) const {
        auto it = amps_.find(m);
        return it == amps_.end() ? Cx(0.0, 0.0) : it->second;
    }
    void set(Mode m, Cx a) {
        if (a == Cx(0.0, 0.0))
            amps_.erase(m);
        else
            amps_[m] = a;
    }
    void add(Mode m, Cx a) { set(m, amplitude(m) + a); }
    double norm2() const;
    const std::map<Mode, Cx>& data() const { return amps_; }

private:
    std::map<Mode, Cx> amps_;
};

// Optical elements. Each acts on the whole mode field at its position in the
// element list.

/// Half-wave plate at `theta_deg`; empty `ports` means a whole plate acting
/// on every port.
struct Hwp {
    double theta_deg = 0.0;
    std::vector<Port> ports;
};

/// Array of per-port half-wave plates; unlisted ports are untouched.
struct HwpArray {
    std::map<Port, double> angles_deg;
};

/// Beam displacer: V moves by `offset`, H passes straight. Offset must be
/// nonzero.
struct BeamDisplacer {
    Port offset;
};

/// Polarizing beam splitter array: H transmits in place; V at port p reflects
/// to v_route[p] when listed, else to p + v_offset. Two amplitudes landing on
/// one output mode raise LayoutError.
struct Pbs {
    Port v_offset;
    std::map<Port, Port> v_route;
};

/// Programmable phase e^{i phi} applied to the V component at listed ports.
struct SlmPhase {
    std::map<Port, double> phases;
};

/// Discards every V amplitude (projective loss onto H).
struct PostSelectH {};

using Element = std::variant<Hwp, HwpArray, BeamDisplacer, Pbs, SlmPhase, PostSelectH>;

struct Network {
    std::vector<Element> elements;
    std::vector<Port> inputs;
    std::vector<Port> outputs;
};

/// Standard half-wave-plate Jones matrix in the (H, V) basis, angle in
/// degrees: [[cos 2t, sin 2t], [sin 2t, -cos 2t]].
Eigen::Matrix2cd hwp_jones(double theta_deg);

/// Apply the network's elements in order.
ModeState simulate(const Network& net, const ModeState& input);

/// Column a = output amplitudes of unit input in `in_modes[a]`, sampled at
/// `out_modes`.
Eigen::MatrixXcd transfer_matrix(const Network& net, const std::vector<Mode>& in_modes,
                                 const std::vector<Mode>& out_modes);

/// max |(T^dagger T - I)_{kl}| - 0 for an exact isometry.
double max_isometry_deviation(const Eigen::MatrixXcd& t);

/// Lattice position of beam address a.
Port address_port(int address);

/// Beam-displacer offset used when splitting/merging address bit k
/// (x for bits 0..2, then y).
Port bit_offset(int bit);

/// One input beam (H at address_port(0)) split into d beams of intensity 1/d
/// on the standard grid; outputs listed in address order.
Network build_source_array(int d = 32);

/// Transmission of the per-beam intensity regulator at SLM phase phi:
/// |1 - e^{i phi}|^2 / 4 = sin^2(phi/2).
double intensity_regulator_transmission(double phi);

/// The regulator chain itself (HWP@22.5, SLM phi, HWP@22.5, PBS, HWP@45):
/// unit H input at address_port(0) exits as H with amplitude (1-e^{i phi})/2
/// at the network's single output port.
Network build_intensity_regulator(double phi);

/// Compiled two-path analyzer: routes paths i and j onto one shared port with
/// orthogonal polarizations, analyzes them with an SLM phase + HWP stage
/// (the "SSM"), and sends the accepted projection onto the detector mode.
struct SubspaceSetting {
    int i = 0;
    int j = 0;
    int d = 0;
    std::vector<std::string> layer_names;  // "HWPA1".."HWPAn", then "HWP1"
    std::vector<std::string> roles;        // per layer: SSM / HWP@0 / theta2@0 / theta3@0 / HWP1@45
    int ssm_layer = 0;                     // index into layer_names
    Port merge_port;                       // shared port right before the SSM stage
    Mode detector;                         // accepted-projection output mode
    Cx gain_i{1.0, 0.0};                   // accumulated routing coefficient of path i at the merge
    Cx gain_j{1.0, 0.0};                   // same for path j
    Pol accept_pol = Pol::V;               // polarization the accepted beam needs after the SSM
    double ssm_theta_deg = 0.0;
    double ssm_phi = 0.0;
    Cx alpha{1.0, 0.0};                    // projector alpha|i> + beta|j> currently configured
    Cx beta{0.0, 0.0};
    std::size_t prefix_elements = 0;       // elements before the SSM stage
    std::size_t ssm_slm_index = 0;         // element indices of the SSM stage
    std::size_t ssm_hwp_index = 0;
    Network network;
};

/// Route pair (i, j) of a d-path analyzer (d a power of 2, d <= 32) with the
/// analysis stage at its canonical layer (just after the two paths merge);
/// the projector defaults to (|i> + |j>)/sqrt2.
SubspaceSetting compile_subspace(int i, int j, int d);

/// Same, but places the analysis stage at an explicit plate layer
/// (1..n_layers). Used to build deliberately miscompiled settings for
/// verifier negative tests.
SubspaceSetting compile_subspace_routed(int i, int j, int d, int ssm_layer);

/// Re-solve the SSM parameters so the detector projects onto
/// alpha|i> + beta|j> (normalized internally; must be nonzero).
void configure_projector(SubspaceSetting& setting, Cx alpha, Cx beta);

struct VerificationCheck {
    std::string name;
    std::string stage;
    double deviation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerificationReport {
    bool pass = true;
    std::vector<VerificationCheck> checks;
    std::string summary() const;
};

/// Simulation-backed checks of a compiled setting against the abstract
/// projector alpha|i> + beta|j>: (a) paths i and j arrive at the merge port
/// as H and V with unit magnitude, (b) every other path leaks < 1e-9 into
/// that port, (c) detector Born probabilities match the abstract projector
/// within 1e-9 on basis and superposition inputs.
VerificationReport verify_subspace_setting(const SubspaceSetting& setting, int d, Cx alpha, Cx beta);

/// Compiled Walsh-type MUB analyzer over d = 2^n ports.
struct MubNetwork {
    int n = 0;
    std::vector<double> phase_profile;  // input SLM phase per address (radians)
    double stage_hwp_deg = 22.5;        // 22.5 = MUB cascade; 0 = computational basis
    std::vector<Mode> input_modes;      // (address_port(a), V), address order
    std::vector<Mode> output_modes;     // detection mode of output index k
    Network network;
};

/// Cascade of n merge stages (routing plates, BD, whole HWP, PBS). At
/// stage_hwp_deg = 22.5 with zero phases, output k projects onto row k of the
/// +-1 product basis; an input phase profile twists the columns; 0 degrades
/// the cascade to the computational basis.
MubNetwork compile_mub_network(int n, const std::vector<double>& phase_profile = {},
                               double stage_hwp_deg = 22.5);

/// Checks the compiled cascade's transfer matrix: isometry within 1e-10,
/// rows equal to the predicted basis (up to a per-row phase) within 1e-10,
/// and - in the 22.5-degree mode - unbiasedness against the computational
/// basis within 1e-10.
VerificationReport verify_mub_network(const MubNetwork& mub);

// Serialization.
std::string network_to_json_text(const Network& net);
std::string subspace_setting_to_json_text(const SubspaceSetting& setting);
/// Fixed-width text table of the per-layer role assignments plus the solved
/// analysis parameters, for human diffing.
std::string subspace_setting_table_text(const SubspaceSetting& setting);

}  // namespace pathcert::optics
