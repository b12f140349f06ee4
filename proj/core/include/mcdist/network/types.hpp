#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcdist/common/linalg.hpp"

namespace mcdist::network {

enum class BusType { Slack, PQ };
enum class Connection { Wye, Delta };

/// Phase indices are 0 = a, 1 = b, 2 = c. kGround marks the reference
/// terminal of a wye element.
inline constexpr int kGround = -1;

struct Bus {
    std::string id;
    std::vector<int> phases;  ///< sorted subset of {0, 1, 2}
    std::vector<double> vmin, vmax;
    BusType type = BusType::PQ;
    double vbase = 0.0;  ///< volts, line-to-neutral
    bool internal = false;
    /// No grounded path: phase-to-neutral voltages are defined only up to a
    /// common offset, so comparisons use phase-to-phase values.
    bool floating = false;
    /// Source phasors (pu), one per entry of `phases`; slack buses only.
    std::vector<Complex> v_set;

    /// Position of `phase` in `phases`, or -1.
    int index_of(int phase) const;
};

/// Pi-section: series Z with possibly unequal shunts at the two ends.
/// Conductor k joins f_conn[k] at f_bus with t_conn[k] at t_bus.
struct Branch {
    std::string id;
    std::string f_bus, t_bus;
    std::vector<int> f_conn, t_conn;
    CMatrix z, y_fr, y_to;
    std::vector<double> rating_current;  ///< per conductor, +inf if unrated
    std::vector<double> rating_power;
    bool status = true;
    bool is_switch = false;
    bool internal = false;
    /// Voltage angle difference limits (radians), only when given in input.
    std::optional<std::pair<double, double>> angle_bounds;

    std::size_t size() const { return f_conn.size(); }
};

/// U_f = T U_t and T^H I_ft + I_tf = 0 on the listed conductors.
struct IdealTransformer {
    std::string id;
    std::string f_bus, t_bus;
    std::vector<int> f_conn, t_conn;
    CMatrix t;
    std::vector<double> tap;  ///< per conductor
    Connection f_config = Connection::Wye;
    Connection t_config = Connection::Wye;
    /// Per-unit turns ratio; T = ratio * I for same-type windings.
    double ratio = 1.0;
    bool status = true;

    std::size_t size() const { return f_conn.size(); }
    bool same_config() const { return f_config == t_config; }
};

struct Shunt {
    std::string id;
    std::string bus;
    std::vector<int> conn;
    CMatrix y;
    /// Vanishing admittance that pins the potential of a floating bus.
    bool anti_floating = false;
};

/// One load or generator element connected between two bus phases, or
/// between a phase and ground when `q == kGround`.
struct Element {
    int p = 0;
    int q = kGround;

    bool delta() const { return q != kGround; }
    bool operator==(const Element&) const = default;
};

struct Zip {
    double a_z = 0.0;
    double a_i = 0.0;
    double a_p = 1.0;
};

struct Load {
    std::string id;
    std::string bus;
    Connection connection = Connection::Wye;
    std::vector<Element> elements;
    std::vector<Complex> s_nom;  ///< per element, pu
    /// Rated element voltage in pu of the bus line-to-neutral base.
    double v_nom = 1.0;
    Zip zip;
};

enum class GeneratorKind { Source, Generator, PvSystem };

struct Generator {
    std::string id;
    std::string bus;
    GeneratorKind kind = GeneratorKind::Generator;
    Connection connection = Connection::Wye;
    std::vector<Element> elements;
    std::vector<double> p_min, p_max, q_min, q_max;  ///< per element, pu
    std::vector<double> p_set, q_set;                ///< power-flow injection
    /// Cost in $/h of total output in MW: c2 P^2 + c1 P + c0.
    double c2 = 0.0, c1 = 0.0, c0 = 0.0;

    bool is_source() const { return kind == GeneratorKind::Source; }
};

struct Storage {
    std::string id;
    std::string bus;
    std::vector<int> conn;
    double energy_max = 0.0;  ///< pu h
    double energy_init = 0.0;
    double p_charge_max = 0.0;  ///< pu, total over phases
    double p_discharge_max = 0.0;
    double eff_charge = 1.0;
    double eff_discharge = 1.0;
    double thermal_rating = 0.0;
};

struct Period {
    double load_scale = 1.0;
    double gen_scale = 1.0;
    double cost_scale = 1.0;
};

struct PeriodSeries {
    double delta_t_hours = 1.0;
    std::vector<Period> periods;
};

struct Network {
    double sbase = 1e6;  ///< VA per phase
    double base_frequency = 60.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<IdealTransformer> transformers;
    std::vector<Shunt> shunts;
    std::vector<Load> loads;
    std::vector<Generator> generators;
    std::vector<Storage> storages;
    std::optional<PeriodSeries> periods;
    std::vector<std::string> warnings;

    /// Rebuild the id lookup after editing `buses`.
    void index();
    const Bus* find_bus(const std::string& id) const;
    const Bus& bus(const std::string& id) const;
    int bus_index(const std::string& id) const;
    const Bus& slack() const;

  private:
    std::map<std::string, int> bus_lookup_;
};

}  // namespace mcdist::network
