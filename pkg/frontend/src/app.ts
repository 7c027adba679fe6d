/**
 * Screen controller: routes the hash to a screen, renders it from API data,
 * and keeps the notification badge fresh by polling.
 *
 * Two rules every screen follows: server messages are rendered verbatim and
 * untruncated, and booking is never optimistic; the UI only changes after the
 * server confirms, and availability is re-fetched after any booking or
 * cancellation outcome (including conflicts).
 */

import {
  ApiClient,
  ApiError,
  type Appointment,
  type AvailabilitySlot,
  type Role,
} from "./api.js";
import { clear, el, labelled } from "./dom.js";
import { addDaysIso, slotLabel, stateLabel, todayIso } from "./format.js";
import { parseHash, routeHash, type Route } from "./router.js";
import { SessionStore } from "./session.js";
import { renderAdminScreen } from "./admin.js";

export interface AppOptions {
  pollIntervalMs?: number;
  now?: () => Date;
}

export class App {
  readonly root: HTMLElement;
  readonly api: ApiClient;
  readonly session: SessionStore;
  readonly now: () => Date;
  role: Role | null = null;

  private readonly pollIntervalMs: number;
  private pollTimer: ReturnType<typeof setInterval> | null = null;
  private lastRenderedHash: string | null = null;
  private inflight: Promise<unknown> = Promise.resolve();
  private badge: HTMLElement | null = null;

  constructor(root: HTMLElement, api: ApiClient, session: SessionStore, options: AppOptions = {}) {
    this.root = root;
    this.api = api;
    this.session = session;
    this.pollIntervalMs = options.pollIntervalMs ?? 15000;
    this.now = options.now ?? (() => new Date());
  }

  start(): void {
    const saved = this.session.load();
    if (saved) {
      this.api.setToken(saved.token);
      this.role = saved.role;
      this.startPolling();
    }
    window.addEventListener("hashchange", () => {
      if (window.location.hash !== this.lastRenderedHash) this.renderCurrent();
    });
    this.renderCurrent();
  }

  /** Queue an async action; tests use settle() to wait for quiescence. */
  run(action: () => Promise<void>): void {
    this.inflight = this.inflight.then(action).catch((err) => {
      console.error(err);
    });
  }

  async settle(): Promise<void> {
    let previous;
    do {
      previous = this.inflight;
      await previous;
    } while (previous !== this.inflight);
  }

  navigate(route: Route): void {
    const hash = routeHash(route);
    if (window.location.hash !== hash) window.location.hash = hash;
    this.renderCurrent();
  }

  renderCurrent(): void {
    const hash = window.location.hash || "#/";
    this.lastRenderedHash = hash;
    const route = parseHash(hash);
    this.run(() => this.render(route));
  }

  private startPolling(): void {
    if (this.pollTimer !== null || this.pollIntervalMs <= 0 || this.role !== "patient") return;
    this.pollTimer = setInterval(() => {
      this.run(async () => {
        await this.refreshBadge();
      });
    }, this.pollIntervalMs);
  }

  private stopPolling(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }

  signOut(): void {
    this.run(async () => {
      try {
        await this.api.logout();
      } catch {
        // the token is dropped locally regardless
      }
      this.api.setToken(null);
      this.session.clear();
      this.role = null;
      this.stopPolling();
      this.navigate({ name: "login" });
    });
  }

  async refreshBadge(): Promise<number> {
    if (this.role !== "patient") return 0;
    const unread = await this.api.notifications(true);
    if (this.badge) this.badge.textContent = unread.length > 0 ? String(unread.length) : "";
    return unread.length;
  }

  // -- rendering ------------------------------------------------------------

  private async render(route: Route): Promise<void> {
    if (route.name === "splash") {
      this.renderChrome(this.brandSplash());
      this.navigate(
        this.role === "admin"
          ? { name: "adminDashboard" }
          : this.role === "patient"
            ? { name: "menu" }
            : { name: "login" },
      );
      return;
    }

    if (route.name.startsWith("admin")) {
      await renderAdminScreen(this, route);
      return;
    }

    switch (route.name) {
      case "signup":
        return this.renderSignup();
      case "login":
        return this.renderLogin();
      default:
        break;
    }

    if (this.role === null) {
      this.navigate({ name: "login" });
      return;
    }
    if (this.role !== "patient") {
      this.renderBlocked("This area is for patients. Sign in with a patient account.");
      return;
    }

    switch (route.name) {
      case "menu":
        return this.renderMenu();
      case "hospitals":
        return this.renderHospitals();
      case "hospitalDetail":
        return this.renderHospitalDetail(route.hospitalId);
      case "hospitalDoctors":
        return this.renderHospitalDoctors(route.hospitalId);
      case "doctorDetail":
        return this.renderDoctorDetail(route.doctorId);
      case "availability":
        return this.renderAvailability(route.doctorId, route.date);
      case "myAppointments":
        return this.renderMyAppointments();
      case "notifications":
        return this.renderNotifications();
      case "schedules":
        return this.renderSchedules();
      case "scheduleDetail":
        return this.renderScheduleDetail(route.group);
      case "about":
        return this.renderAbout();
      default:
        this.renderChrome(el("p", { className: "muted" }, "Screen not found."));
    }
  }

  renderChrome(...content: (Node | string)[]): HTMLElement {
    clear(this.root);
    const header = el(
      "header",
      { className: "topbar" },
      el("span", { className: "brand", onClick: () => this.navigate({ name: "splash" }) }, "MedBook"),
    );
    if (this.role === "patient") {
      this.badge = el("span", { className: "badge" });
      header.append(
        el("nav", {},
          this.link("Menu", { name: "menu" }),
          this.link("Notifications", { name: "notifications" }),
          this.badge,
          el("a", { href: "#", className: "signout", onClick: (e) => { e.preventDefault(); this.signOut(); } }, "Sign out"),
        ),
      );
    } else if (this.role === "admin") {
      header.append(
        el("nav", {},
          this.link("Dashboard", { name: "adminDashboard" }),
          el("a", { href: "#", className: "signout", onClick: (e) => { e.preventDefault(); this.signOut(); } }, "Sign out"),
        ),
      );
    }
    const main = el("main", { className: "screen" }, ...content);
    this.root.append(header, main);
    return main;
  }

  link(text: string, route: Route, className = ""): HTMLAnchorElement {
    return el(
      "a",
      {
        href: routeHash(route),
        className,
        onClick: (e) => {
          e.preventDefault();
          this.navigate(route);
        },
      },
      text,
    );
  }

  private brandSplash(): HTMLElement {
    return el("div", { className: "splash" }, el("h1", {}, "MedBook"), el("p", {}, "Loading…"));
  }

  errorBox(): HTMLElement {
    return el("div", { className: "error", id: "error" });
  }

  showError(box: HTMLElement, err: unknown): void {
    clear(box);
    if (err instanceof ApiError) {
      // one line per server message, each byte-exact
      if (err.issues.length > 1) {
        for (const issue of err.issues) box.append(el("p", {}, issue.message));
      } else {
        box.append(el("p", {}, err.message));
      }
    } else {
      box.append(el("p", {}, err instanceof Error ? err.message : String(err)));
    }
  }

  renderBlocked(reason: string): void {
    this.renderChrome(
      el("div", { className: "blocked" },
        el("h2", {}, "Access denied"),
        el("p", {}, reason),
      ),
    );
  }

  // -- auth screens ----------------------------------------------------------

  private async renderSignup(): Promise<void> {
    const error = this.errorBox();
    const username = el("input", { name: "username", placeholder: "username" });
    const email = el("input", { name: "email", placeholder: "email" });
    const password = el("input", { name: "password", type: "password", placeholder: "password" });
    const confirm = el("input", { name: "confirm", type: "password", placeholder: "confirm password" });
    const success = el("div", { className: "success" });

    const form = el(
      "form",
      {
        className: "card",
        onSubmit: (e) => {
          e.preventDefault();
          this.run(async () => {
            clear(error);
            clear(success);
            try {
              const result = await this.api.signup(username.value, email.value, password.value, confirm.value);
              success.append(
                el("p", {}, result.message),
                this.link("Continue to sign in", { name: "login" }),
              );
            } catch (err) {
              this.showError(error, err);
            }
          });
        },
      },
      el("h2", {}, "Sign up"),
      labelled("Username", username),
      labelled("Email", email),
      labelled("Password", password),
      labelled("Confirm password", confirm),
      el("button", { type: "submit" }, "Sign up"),
      error,
      success,
    );
    this.renderChrome(form, el("p", {}, "Already registered? ", this.link("Sign in", { name: "login" })));
  }

  private async renderLogin(): Promise<void> {
    const error = this.errorBox();
    const username = el("input", { name: "username", placeholder: "username" });
    const password = el("input", { name: "password", type: "password", placeholder: "password" });
    const form = el(
      "form",
      {
        className: "card",
        onSubmit: (e) => {
          e.preventDefault();
          this.run(async () => {
            clear(error);
            try {
              const result = await this.api.login(username.value, password.value);
              this.api.setToken(result.token);
              this.session.save({ token: result.token, role: result.role, expiresAt: result.expires_at });
              this.role = result.role;
              this.startPolling();
              this.navigate({ name: "menu" });
            } catch (err) {
              this.showError(error, err);
            }
          });
        },
      },
      el("h2", {}, "Sign in"),
      labelled("Username", username),
      labelled("Password", password),
      el("button", { type: "submit" }, "Sign in"),
      error,
    );
    this.renderChrome(
      form,
      el("p", {}, "New here? ", this.link("Sign up", { name: "signup" })),
      el("p", { className: "muted" }, "Clinic staff: ", this.link("admin console", { name: "adminLogin" })),
    );
  }

  // -- patient screens --------------------------------------------------------

  private async renderMenu(): Promise<void> {
    this.renderChrome(
      el("h2", {}, "Menu"),
      el("ul", { className: "menu" },
        el("li", {}, this.link("Hospitals", { name: "hospitals" })),
        el("li", {}, this.link("Doctors", { name: "hospitals" }, "menu-doctors")),
        el("li", {}, this.link("My appointments", { name: "myAppointments" })),
        el("li", {}, this.link("Notifications", { name: "notifications" })),
        el("li", {}, this.link("Health schedules", { name: "schedules" })),
        el("li", {}, this.link("About", { name: "about" })),
        el("li", {}, el("a", { href: "#", className: "signout", onClick: (e) => { e.preventDefault(); this.signOut(); } }, "Sign out")),
      ),
    );
    try {
      await this.refreshBadge();
    } catch {
      // badge is cosmetic; menu still renders if the feed call fails
    }
  }

  private async renderHospitals(): Promise<void> {
    const error = this.errorBox();
    const list = el("ul", { className: "list hospitals" });
    this.renderChrome(el("h2", {}, "Hospitals"), el("p", { className: "muted" }, "Choose a hospital to see its doctors."), error, list);
    try {
      const hospitals = await this.api.hospitals();
      if (hospitals.length === 0) list.append(el("li", { className: "muted" }, "No hospitals yet."));
      for (const hospital of hospitals) {
        list.append(el("li", {}, this.link(hospital.name, { name: "hospitalDetail", hospitalId: hospital.id })));
      }
    } catch (err) {
      this.showError(error, err);
    }
  }

  private async renderHospitalDetail(hospitalId: string): Promise<void> {
    const error = this.errorBox();
    const main = this.renderChrome(error);
    try {
      const hospital = await this.api.hospital(hospitalId);
      main.append(
        el("h2", {}, hospital.name),
        el("p", {}, hospital.description),
        el("p", {}, hospital.address),
        el("p", {}, "Phone: ", el("a", { href: hospital.contact_uri, className: "tel" }, hospital.phone)),
        el("p", {}, el("a", { href: hospital.map_url, target: "_blank", rel: "noreferrer", className: "map" }, "Get directions on map")),
        el("p", { className: "muted" }, `Local time zone: ${hospital.timezone}`),
        this.link("View doctors", { name: "hospitalDoctors", hospitalId }, "button-like"),
      );
    } catch (err) {
      this.showError(error, err);
    }
  }

  private async renderHospitalDoctors(hospitalId: string): Promise<void> {
    const error = this.errorBox();
    const list = el("ul", { className: "list doctors" });
    const main = this.renderChrome(el("h2", {}, "Doctors"), error, list);
    try {
      const [hospital, doctors] = await Promise.all([
        this.api.hospital(hospitalId),
        this.api.hospitalDoctors(hospitalId),
      ]);
      main.insertBefore(el("p", { className: "muted" }, hospital.name), error);
      if (doctors.length === 0) list.append(el("li", { className: "muted" }, "No doctors at this hospital yet."));
      for (const doctor of doctors) {
        list.append(
          el("li", {},
            this.link(doctor.name, { name: "doctorDetail", doctorId: doctor.id }),
            el("span", { className: "muted" }, ` — ${doctor.specialty}`),
          ),
        );
      }
    } catch (err) {
      this.showError(error, err);
    }
  }

  private async renderDoctorDetail(doctorId: string): Promise<void> {
    const error = this.errorBox();
    const main = this.renderChrome(error);
    try {
      const doctor = await this.api.doctor(doctorId);
      const hours = el("ul", { className: "hours" });
      for (const [day, intervals] of Object.entries(doctor.working_hours)) {
        hours.append(el("li", {}, `${day}: ${intervals.map(([s, e]) => `${s}–${e}`).join(", ")}`));
      }
      main.append(
        el("h2", {}, doctor.name),
        el("p", {}, `${doctor.specialty} · ${doctor.hospital_name}`),
        el("p", {}, "Phone: ", el("a", { href: doctor.contact_uri, className: "tel" }, doctor.phone)),
        el("p", {}, "Email: ", el("a", { href: doctor.email_uri, className: "mailto" }, doctor.email)),
        el("h3", {}, "Working hours"),
        hours,
        this.link("Book appointment", { name: "availability", doctorId }, "button-like book"),
      );
    } catch (err) {
      this.showError(error, err);
    }
  }

  async renderAvailability(doctorId: string, date?: string): Promise<void> {
    const chosenDate = date ?? addDaysIso(todayIso(this.now()), 1);
    const error = this.errorBox();
    const dateInput = el("input", { type: "date", value: chosenDate });
    dateInput.addEventListener("change", () => {
      this.navigate({ name: "availability", doctorId, date: dateInput.value });
    });
    const grid = el("div", { className: "slot-grid" });
    const main = this.renderChrome(
      el("h2", {}, "Pick a day & time slot"),
      labelled("Date", dateInput),
      error,
      grid,
    );
    try {
      const [doctor, availability] = await Promise.all([
        this.api.doctor(doctorId),
        this.api.availability(doctorId, chosenDate),
      ]);
      main.insertBefore(el("p", { className: "muted" }, `${doctor.name} · ${doctor.hospital_name}`), error);
      if (availability.slots.length === 0) {
        grid.append(el("p", { className: "muted empty" }, "No slots this day. Try another date."));
      }
      for (const slot of availability.slots) {
        grid.append(this.slotButton(doctorId, chosenDate, slot, error));
      }
    } catch (err) {
      this.showError(error, err);
    }
  }

  private slotButton(doctorId: string, date: string, slot: AvailabilitySlot, error: HTMLElement): HTMLElement {
    const taken = slot.status === "taken";
    return el(
      "button",
      {
        className: `slot ${slot.status}`,
        disabled: taken,
        onClick: () => {
          this.run(async () => {
            clear(error);
            try {
              const result = await this.api.book(doctorId, date, slot.start);
              await this.renderBookingConfirmation(result.message, result.appointment);
            } catch (err) {
              this.showError(error, err);
              // conflict or validation: the calendar may be stale, re-fetch it
              await this.renderAvailability(doctorId, date);
              const freshError = this.root.querySelector<HTMLElement>("#error");
              if (freshError) this.showError(freshError, err);
            }
          });
        },
      },
      slotLabel(slot.start, slot.duration_minutes),
    );
  }

  private async renderBookingConfirmation(message: string, appointment: Appointment): Promise<void> {
    this.renderChrome(
      el("div", { className: "confirmation" },
        el("h2", {}, "Appointment reserved"),
        el("p", { className: "server-message" }, message),
        el("p", {}, `${appointment.doctor_name} · ${appointment.hospital_name}`),
        el("p", {}, `${appointment.date} at ${appointment.start}`),
        this.link("My appointments", { name: "myAppointments" }, "button-like"),
        this.link("Back to menu", { name: "menu" }),
      ),
    );
  }

  private async renderMyAppointments(): Promise<void> {
    const error = this.errorBox();
    const list = el("ul", { className: "list appointments" });
    this.renderChrome(el("h2", {}, "My appointments"), error, list);
    try {
      const rows = await this.api.myAppointments();
      if (rows.length === 0) list.append(el("li", { className: "muted" }, "No appointments yet."));
      for (const row of rows) {
        const item = el(
          "li",
          { className: `state-${row.state}` },
          el("span", {}, `${row.date} ${row.start} · ${row.doctor_name} (${row.hospital_name}) — `),
          el("strong", {}, stateLabel(row.state)),
        );
        if (row.state === "reserved") {
          item.append(
            el("button", {
              className: "cancel",
              onClick: () => {
                this.run(async () => {
                  clear(error);
                  try {
                    await this.api.cancel(row.id);
                    await this.renderMyAppointments();
                  } catch (err) {
                    this.showError(error, err);
                  }
                });
              },
            }, "Cancel"),
          );
        }
        list.append(item);
      }
    } catch (err) {
      this.showError(error, err);
    }
  }

  private async renderNotifications(): Promise<void> {
    const error = this.errorBox();
    const list = el("ul", { className: "list notifications" });
    this.renderChrome(el("h2", {}, "Notifications"), error, list);
    try {
      const rows = await this.api.notifications();
      if (rows.length === 0) list.append(el("li", { className: "muted" }, "Nothing yet."));
      for (const row of rows) {
        const item = el(
          "li",
          { className: row.read ? "read" : "unread" },
          el("span", { className: "kind" }, row.kind === "appointment_cancelled" ? "⚠ " : "✓ "),
          el("span", { className: "message" }, row.message),
        );
        if (!row.read) {
          item.append(
            el("button", {
              className: "mark-read",
              onClick: () => {
                this.run(async () => {
                  try {
                    await this.api.markRead(row.id);
                    await this.renderNotifications();
                  } catch (err) {
                    this.showError(error, err);
                  }
                });
              },
            }, "Mark read"),
          );
        }
        list.append(item);
      }
    } catch (err) {
      this.showError(error, err);
    }
  }

  private async renderSchedules(): Promise<void> {
    const error = this.errorBox();
    const list = el("ul", { className: "list schedules" });
    this.renderChrome(el("h2", {}, "Health schedules"), error, list);
    try {
      const groups = await this.api.scheduleGroups();
      if (groups.length === 0) list.append(el("li", { className: "muted" }, "No schedules published."));
      for (const group of groups) {
        list.append(el("li", {}, this.link(group, { name: "scheduleDetail", group })));
      }
    } catch (err) {
      this.showError(error, err);
    }
  }

  private async renderScheduleDetail(group: string): Promise<void> {
    const error = this.errorBox();
    const main = this.renderChrome(error);
    try {
      const schedule = await this.api.schedule(group);
      const entries = el("dl", { className: "entries" });
      for (const entry of schedule.entries) {
        entries.append(el("dt", {}, entry.title), el("dd", {}, entry.guidance));
      }
      main.append(el("h2", {}, schedule.group), entries, this.link("All schedules", { name: "schedules" }));
    } catch (err) {
      this.showError(error, err);
    }
  }

  private async renderAbout(): Promise<void> {
    const error = this.errorBox();
    const main = this.renderChrome(error);
    try {
      const about = await this.api.about();
      const developers = el("ul", { className: "developers" });
      for (const dev of about.developers) developers.append(el("li", {}, dev));
      main.append(el("h2", {}, "About"), el("p", { className: "objectives" }, about.objectives), developers);
    } catch (err) {
      this.showError(error, err);
    }
  }
}
