/**
 * Typed client for the booking API. Every non-2xx response is raised as an
 * ApiError carrying the server's machine code and its message string
 * verbatim, so screens can display exactly what the server said.
 */

export type Role = "patient" | "admin";

export interface FieldIssue {
  field: string;
  code: string;
  message: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly issues: FieldIssue[] = [],
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface SignupResult {
  message: string;
  patient: { id: string; username: string; email: string };
}

export interface LoginResult {
  token: string;
  role: Role;
  expires_at: string;
}

export interface HospitalSummary {
  id: string;
  name: string;
}

export interface HospitalDetail extends HospitalSummary {
  address: string;
  phone: string;
  latitude: number;
  longitude: number;
  description: string;
  timezone: string;
  contact_uri: string;
  map_url: string;
}

export interface DoctorSummary {
  id: string;
  name: string;
  specialty: string;
}

export interface DoctorDetail extends DoctorSummary {
  hospital_id: string;
  hospital_name: string;
  phone: string;
  email: string;
  working_hours: Record<string, [string, string][]>;
  active: boolean;
  contact_uri: string;
  email_uri: string;
}

export interface AvailabilitySlot {
  start: string;
  duration_minutes: number;
  status: "free" | "taken";
}

export interface Availability {
  doctor_id: string;
  date: string;
  slots: AvailabilitySlot[];
}

export type AppointmentState = "reserved" | "cancelled_by_patient" | "cancelled_by_staff";

export interface Appointment {
  id: string;
  doctor_id: string;
  doctor_name: string;
  hospital_id: string;
  hospital_name: string;
  date: string;
  start: string;
  duration_minutes: number;
  state: AppointmentState;
  created_at: string;
  cancelled_at: string | null;
  patient_id?: string;
  patient_username?: string;
}

export interface BookingResult {
  message: string;
  appointment: Appointment;
}

export interface CancelResult {
  ok: boolean;
  appointment: Appointment;
}

export interface NotificationItem {
  id: string;
  kind: "booking_confirmed" | "appointment_cancelled";
  appointment_id: string;
  message: string;
  created_at: string;
  read: boolean;
}

export interface ScheduleEntry {
  title: string;
  guidance: string;
}

export interface ScheduleDetail {
  group: string;
  entries: ScheduleEntry[];
}

export interface AboutInfo {
  objectives: string;
  developers: string[];
}

export interface PatientRow {
  id: string;
  username: string;
  email: string;
  created_at: string;
}

export interface NewHospital {
  name: string;
  address: string;
  phone: string;
  latitude: number;
  longitude: number;
  description: string;
  timezone: string;
}

export interface NewDoctor {
  hospital_id: string;
  name: string;
  specialty: string;
  phone: string;
  email: string;
  working_hours: Record<string, [string, string][]>;
}

export interface AppointmentFilters {
  doctor_id?: string;
  from?: string;
  to?: string;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

const defaultFetch: FetchLike = (input, init) => fetch(input, init);

export class ApiClient {
  private token: string | null = null;

  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = defaultFetch,
  ) {}

  setToken(token: string | null): void {
    this.token = token;
  }

  hasToken(): boolean {
    return this.token !== null;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    query?: Record<string, string | undefined>,
  ): Promise<T> {
    let url = this.baseUrl + path;
    if (query) {
      const params = new URLSearchParams();
      for (const [key, value] of Object.entries(query)) {
        if (value !== undefined && value !== "") params.set(key, value);
      }
      const qs = params.toString();
      if (qs) url += `?${qs}`;
    }
    const headers: Record<string, string> = { Accept: "application/json" };
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;

    const response = await this.fetchFn(url, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      throw await this.toError(response);
    }
    return (await response.json()) as T;
  }

  private async toError(response: Response): Promise<ApiError> {
    try {
      const body = (await response.json()) as {
        code?: string;
        message?: string;
        errors?: FieldIssue[];
      };
      return new ApiError(
        response.status,
        body.code ?? "http_error",
        body.message ?? `request failed with status ${response.status}`,
        body.errors ?? [],
      );
    } catch {
      return new ApiError(response.status, "http_error", `request failed with status ${response.status}`);
    }
  }

  // -- auth --

  signup(username: string, email: string, password: string, confirm: string): Promise<SignupResult> {
    return this.request("POST", "/auth/signup", { username, email, password, confirm });
  }

  login(username: string, password: string): Promise<LoginResult> {
    return this.request("POST", "/auth/login", { username, password });
  }

  adminLogin(username: string, password: string): Promise<LoginResult> {
    return this.request("POST", "/admin/login", { username, password });
  }

  async logout(): Promise<void> {
    await this.request("POST", "/auth/logout");
    this.token = null;
  }

  // -- catalog --

  hospitals(): Promise<HospitalSummary[]> {
    return this.request("GET", "/hospitals");
  }

  hospital(id: string): Promise<HospitalDetail> {
    return this.request("GET", `/hospitals/${encodeURIComponent(id)}`);
  }

  hospitalDoctors(id: string): Promise<DoctorSummary[]> {
    return this.request("GET", `/hospitals/${encodeURIComponent(id)}/doctors`);
  }

  doctor(id: string): Promise<DoctorDetail> {
    return this.request("GET", `/doctors/${encodeURIComponent(id)}`);
  }

  availability(doctorId: string, date: string): Promise<Availability> {
    return this.request("GET", `/doctors/${encodeURIComponent(doctorId)}/availability`, undefined, { date });
  }

  scheduleGroups(): Promise<string[]> {
    return this.request("GET", "/health-schedules");
  }

  schedule(group: string): Promise<ScheduleDetail> {
    return this.request("GET", `/health-schedules/${encodeURIComponent(group)}`);
  }

  about(): Promise<AboutInfo> {
    return this.request("GET", "/about");
  }

  // -- booking --

  book(doctorId: string, date: string, start: string): Promise<BookingResult> {
    return this.request("POST", "/appointments", { doctor_id: doctorId, date, start });
  }

  myAppointments(): Promise<Appointment[]> {
    return this.request("GET", "/appointments");
  }

  cancel(appointmentId: string): Promise<CancelResult> {
    return this.request("DELETE", `/appointments/${encodeURIComponent(appointmentId)}`);
  }

  notifications(unreadOnly = false): Promise<NotificationItem[]> {
    return this.request(
      "GET",
      "/notifications",
      undefined,
      unreadOnly ? { unread_only: "true" } : undefined,
    );
  }

  markRead(notificationId: string): Promise<{ ok: boolean }> {
    return this.request("POST", `/notifications/${encodeURIComponent(notificationId)}/read`);
  }

  // -- admin --

  adminAddHospital(hospital: NewHospital): Promise<HospitalDetail> {
    return this.request("POST", "/admin/hospitals", hospital);
  }

  adminAddDoctor(doctor: NewDoctor): Promise<DoctorDetail> {
    return this.request("POST", "/admin/doctors", doctor);
  }

  adminPatients(): Promise<PatientRow[]> {
    return this.request("GET", "/admin/patients");
  }

  adminDoctors(): Promise<DoctorDetail[]> {
    return this.request("GET", "/admin/doctors");
  }

  adminAppointments(filters: AppointmentFilters = {}): Promise<Appointment[]> {
    return this.request("GET", "/admin/appointments", undefined, {
      doctor_id: filters.doctor_id,
      from: filters.from,
      to: filters.to,
    });
  }

  health(): Promise<{ status: string }> {
    return this.request("GET", "/health");
  }
}
